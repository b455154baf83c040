"""Thermal simulator and calibration toolkit for laser-heated cylindrical
evaporation sources. Everything lives in the compiled core; this package
just re-exports it."""

from ._tlesim import *  # noqa: F401,F403
from ._tlesim import __version__, constants  # noqa: F401
