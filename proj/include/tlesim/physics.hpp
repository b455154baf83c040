#pragma once

#include <optional>

#include "tlesim/material.hpp"

namespace tlesim {

// CW Gaussian beam normally incident on the top surface, SI units throughout.
// power in W, gaussian_radius (1/e^2 of intensity: the profile carries
// exp(-r^2 / omega^2)) and spot center in m.
struct LaserSpec {
  double power = 0.0;
  double wavelength = 1030e-9;
  double gaussian_radius = 750e-6;
  double center_x = 0.0;
  double center_y = 0.0;
  bool attenuation_enabled = false;
};

// Vacuum chamber: ambient (wall) temperature and the beam path length from
// entry window to source, which bounds the column of vapor the beam crosses.
struct ChamberSpec {
  double ambient_temperature = 300.0;  // K
  double beam_path = 0.5;              // m
};

void validate(const LaserSpec& laser);
void validate(const ChamberSpec& chamber, const LaserSpec& laser);

// Absorbed flux (W/m^2) at a point (x, y) of the top surface:
//   (1 - R) P / (pi omega^2) exp(-((x-x0)^2 + (y-y0)^2) / omega^2) exp(-tau)
double laser_flux(const LaserSpec& laser, double reflectivity, double x, double y,
                  double optical_depth = 0.0);

// Net thermal radiation to chamber walls: eps sigma (T^4 - Tamb^4), in W/m^2.
double radiative_flux(double emissivity, double temperature, double ambient_temperature);
double radiative_flux_derivative(double emissivity, double temperature);

// Hertz-Knudsen free-evaporation mass flux p(T) sqrt(m / (2 pi kb T)), kg/(m^2 s).
double evaporative_mass_flux(const Material& mat, double temperature);

// Energy carried away per unit area: (dHvap/M + 3 NA kb T / (2 M)) * mass flux, W/m^2.
double evaporative_heat_flux(const Material& mat, double temperature);
double evaporative_heat_flux_derivative(const Material& mat, double temperature);

// Resonant absorption cross-section of a two-level line at laser detuning:
// sigma0 = 3 lambda0^2 / (2 pi), scaled by Gamma^2 / (Gamma^2 + 4 Delta^2)
// with angular detuning Delta = 2 pi c (1/lambda - 1/lambda0).
double absorption_cross_section(const Transition& line, double laser_wavelength);

// The material transition closest in wavelength to the laser, if any.
std::optional<Transition> nearest_transition(const Material& mat, double laser_wavelength);

// Optical depth of the vapor column above the spot, using the closed form
//   tau = 3 lambda0^2 / (2 sqrt(2) pi kb T) * Gamma^2/(Gamma^2 + 4 Delta^2)
//         * p(T) * (1/omega - 1/r0),
// evaluated at the peak surface temperature. Returns 0 when attenuation is
// disabled or the material lists no transitions.
double optical_depth(const Material& mat, double surface_temperature, const LaserSpec& laser,
                     const ChamberSpec& chamber);

} // namespace tlesim
