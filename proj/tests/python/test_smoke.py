import json
import math
import os

import pytest

import tlesim

DATA_DIR = os.path.abspath(
    os.environ.get(
        "TLESIM_DATA_DIR",
        os.path.join(os.path.dirname(__file__), "..", "..", "data"),
    )
)
DATABASE = os.path.join(DATA_DIR, "materials.json")


@pytest.fixture(scope="module")
def registry():
    return tlesim.load_material_database(DATABASE)


@pytest.fixture(scope="module")
def tantalum(registry):
    return registry.get("Ta")


def test_constants_exact():
    c = tlesim.constants
    assert c.avogadro == 6.02214076e23
    assert c.boltzmann == 1.380649e-23
    assert c.stefan_boltzmann == 5.670374419e-8
    assert c.speed_of_light == 2.99792458e8
    assert c.gas_constant == c.avogadro * c.boltzmann


def test_material_database(registry, tantalum):
    assert set(registry.names()) >= {"Ta", "Pt", "Mo", "Ti", "Cu"}
    assert tantalum.density == 16600.0
    assert tantalum.melting_point == pytest.approx(3293, abs=5)
    assert tlesim.reflectivity_at(tantalum, 1030e-9) == pytest.approx(0.75, abs=0.2)
    # vapor pressure must grow steeply with temperature
    p_lo = tlesim.vapor_pressure(tantalum, 2500.0)
    p_hi = tlesim.vapor_pressure(tantalum, 3300.0)
    assert 0 < p_lo < p_hi


def test_mesh_counts_and_volume():
    mesh = tlesim.generate_cylinder_mesh(3e-3, 8e-3, 2)
    assert mesh.num_tets == 36 * 2**3
    assert mesh.num_vertices == (1 + 3 * 2 * 3) * (2 * 2 + 1)
    report = tlesim.mesh_quality_report(mesh)
    exact = math.pi * 1.5e-3**2 * 8e-3
    assert report.total_volume == pytest.approx(exact, rel=0.05)


def test_flux_laws(tantalum):
    laser = tlesim.LaserSpec()
    laser.power = 280.0
    assert tlesim.laser_flux(laser, 0.75, 0.0, 0.0) == pytest.approx(
        0.25 * 280.0 / (math.pi * 750e-6**2)
    )
    assert tlesim.radiative_flux(0.21, 300.0, 300.0) == 0.0
    assert tlesim.evaporative_mass_flux(tantalum, 3000.0) > 0.0


def test_optical_depth_band(tantalum):
    laser = tlesim.LaserSpec()
    laser.power = 280.0
    laser.attenuation_enabled = True
    chamber = tlesim.ChamberSpec()
    tau = tlesim.optical_depth(tantalum, 3293.0, laser, chamber)
    assert 1e-10 < tau < 1e-6


def make_case(tantalum, refinement=1, power=280.0):
    case = tlesim.CaseConfig()
    case.mesh = tlesim.generate_cylinder_mesh(3e-3, 8e-3, refinement)
    case.material = tantalum
    laser = tlesim.LaserSpec()
    laser.power = power
    case.laser = laser
    case.chamber = tlesim.ChamberSpec()
    case.controls = tlesim.SolverControls()
    return case


def test_steady_solve(tantalum):
    case = make_case(tantalum)
    result = tlesim.run_to_steady(case)
    assert result.peak_temperature > 2000.0
    assert result.mass_rate > 0.0
    assert abs(result.power.balance_residual()) <= 1e-2
    assert len(result.field.values) == case.mesh.num_vertices
    peak, vertex = tlesim.peak_temperature(result.field)
    assert peak == result.peak_temperature
    assert vertex == result.peak_vertex


def test_cooling_without_laser(tantalum):
    case = make_case(tantalum)
    hot = tlesim.uniform_field(case.mesh, 2000.0)
    out = tlesim.advance_transient(case, hot, 0.05, laser_off_time=0.0)
    assert out.trace[-1].peak_temperature < 2000.0
    times = [s.time for s in out.trace]
    assert times == sorted(times)


def test_config_round_trip(tmp_path, tantalum):
    config = {
        "material": "Ta",
        "database": DATABASE,
        "mesh": {"generate": {"diameter_mm": 3.0, "length_mm": 8.0, "refinement": 1}},
        "laser": {"power_W": 280.0},
    }
    path = tmp_path / "case.json"
    path.write_text(json.dumps(config))
    run = tlesim.load_run_config(str(path))
    assert run.laser.power == 280.0
    assert run.laser.gaussian_radius == 750e-6
    case = tlesim.resolve_case(run)
    assert case.mesh.num_tets == 36
    manifest = json.loads(tlesim.run_manifest_json(run, case, "steady"))
    assert manifest["constants"]["avogadro_per_mol"] == 6.02214076e23
    assert manifest["material"]["name"] == "Ta"


def test_melting_power_with_stub():
    # closed-form stand-in: peak rises 1 K per W above ambient
    result = tlesim.find_melting_power(
        lambda p: tlesim.SteadyProbe(peak_temperature=300.0 + p),
        1300.0,
        300.0,
        tolerance_K=5.0,
    )
    assert abs(result.power - 1000.0) <= 5.0
    assert len(result.brackets) == result.iterations


def test_neutral_line_with_stub():
    def cell(eps, refl):
        return tlesim.SteadyProbe(peak_temperature=2000.0 - 1500.0 * refl)

    grid = tlesim.scan_epsilon_reflectivity(cell, [0.1, 0.2], [0.5, 0.9], 1000.0)
    assert grid.rows == 2 and grid.cols == 2
    line = tlesim.extract_neutral_line(grid, cell, tolerance_K=2.0)
    assert len(line) == 2
    for point in line:
        assert point.reflectivity == pytest.approx(2.0 / 3.0, abs=0.01)


def test_unknown_config_key_raises(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"material": "Ta", "database": %s, "omega_um": 750}' % json.dumps(DATABASE))
    with pytest.raises(tlesim.ConfigError):
        tlesim.load_run_config(str(path))
