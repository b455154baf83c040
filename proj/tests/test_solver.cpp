#include <doctest.h>

#include <cmath>
#include <memory>
#include <string>

#include "tlesim/postprocess.hpp"
#include "tlesim/solver.hpp"

using namespace tlesim;

namespace {

const Material& tantalum() {
  static MaterialRegistry registry = load_material_database(std::string(TLESIM_DATA_DIR) +
                                                            "/materials.json");
  return registry.get("Ta");
}

CaseConfig reference_case(int refinement, double power) {
  CaseConfig config;
  config.mesh = std::make_shared<Mesh>(generate_cylinder_mesh(3e-3, 8e-3, refinement));
  config.material = tantalum();
  config.laser.power = power;
  config.laser.wavelength = 1030e-9;
  config.laser.gaussian_radius = 750e-6;
  return config;
}

} // namespace

TEST_CASE("a single implicit step converges quadratically from ambient") {
  const CaseConfig config = reference_case(1, 50.0);
  const ThermalSystem system(config.mesh, config.material, config.laser, config.chamber);
  const int n = config.mesh->num_vertices();
  std::vector<double> T(static_cast<size_t>(n), 300.0);
  const std::vector<double> T_prev = T;
  const NewtonReport report = solve_nonlinear(system, T, T_prev, 1e-3, 0.0, config.controls);
  CHECK(report.iterations >= 1);
  CHECK(report.iterations <= 10);
  REQUIRE(report.residual_history.size() >= 2);
  CHECK(report.residual_history.back() <= config.controls.newton_tol);
  // The step heats the lit surface and nothing cools below ambient.
  double peak = 0.0;
  for (double t : T) {
    CHECK(t >= 300.0 - 1e-9);
    peak = std::max(peak, t);
  }
  CHECK(peak > 300.0);
}

TEST_CASE("steady state on a coarse source balances power and melts the spot") {
  CaseConfig config = reference_case(2, 280.0);
  const SteadyResult steady = run_to_steady(config);
  CHECK(steady.final_time > 0.0);
  CHECK(steady.final_time < config.controls.max_time);
  CHECK_FALSE(steady.history.empty());
  CHECK(steady.power.absorbed > 50.0);
  CHECK(steady.power.balance_residual() <= config.controls.steady_balance_tol);
  CHECK(steady.history.back().max_rate <= config.controls.steady_rate_tol);
  // Coarse-mesh peak lands in the physically plausible band around melting.
  CHECK(steady.peak_temperature > 2500.0);
  CHECK(steady.peak_temperature < 4200.0);
  CHECK(steady.mass_rate > 0.0);
  // The hottest point sits on the lit surface at the spot center.
  const Vec3 v = config.mesh->vertices[static_cast<size_t>(steady.peak_vertex)];
  CHECK(v.z == doctest::Approx(8e-3).epsilon(1e-12));
  CHECK(std::hypot(v.x, v.y) < 0.4e-3);
}

TEST_CASE("zero power reports the ambient equilibrium immediately") {
  CaseConfig config = reference_case(1, 0.0);
  const SteadyResult steady = run_to_steady(config);
  CHECK(steady.final_time == 0.0);
  CHECK(steady.history.empty());
  CHECK(steady.peak_temperature == doctest::Approx(300.0));
  CHECK(steady.mass_rate < 1e-30);
  CHECK_FALSE(steady.melted);
  CHECK(steady.power.absorbed == 0.0);
}

TEST_CASE("steady solves are deterministic") {
  const SteadyResult a = run_to_steady(reference_case(1, 120.0));
  const SteadyResult b = run_to_steady(reference_case(1, 120.0));
  CHECK(a.peak_temperature == b.peak_temperature);
  CHECK(a.mass_rate == b.mass_rate);
  CHECK(a.final_time == b.final_time);
  REQUIRE(a.history.size() == b.history.size());
  CHECK(a.history.back().dt == b.history.back().dt);
}

TEST_CASE("heating trace rises monotonically toward steady state") {
  CaseConfig config = reference_case(1, 120.0);
  const TemperatureField start = uniform_field(config.mesh, 300.0);
  const TransientResult run = advance_transient(config, start, 2.0);
  REQUIRE(run.trace.size() >= 3);
  CHECK(run.trace.front().spot_temperature == doctest::Approx(300.0));
  for (size_t k = 1; k < run.trace.size(); ++k) {
    CHECK(run.trace[k].spot_temperature >= run.trace[k - 1].spot_temperature - 1e-9);
    CHECK(run.trace[k].peak_temperature >= run.trace[k].spot_temperature - 1e-9);
  }
  CHECK(run.field.time == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(run.trace.back().spot_temperature > 1000.0);
}

TEST_CASE("switching the laser off turns heating into monotone cooling") {
  CaseConfig config = reference_case(1, 120.0);
  const TemperatureField start = uniform_field(config.mesh, 300.0);
  const TransientResult run = advance_transient(config, start, 3.0, 1.0);

  // Locate the hottest sample; it must sit at the switch-off instant.
  size_t hottest = 0;
  for (size_t k = 1; k < run.trace.size(); ++k)
    if (run.trace[k].spot_temperature > run.trace[hottest].spot_temperature) hottest = k;
  CHECK(run.trace[hottest].time == doctest::Approx(1.0).epsilon(1e-6));

  for (size_t k = hottest + 1; k < run.trace.size(); ++k)
    CHECK(run.trace[k].spot_temperature <= run.trace[k - 1].spot_temperature + 1e-9);
  CHECK(run.trace.back().spot_temperature < run.trace[hottest].spot_temperature);
  CHECK(run.trace.back().spot_temperature >= 300.0 - 1e-9);
}

TEST_CASE("cooling continues from a handed-over field") {
  CaseConfig config = reference_case(1, 120.0);
  const SteadyResult steady = run_to_steady(config);
  CaseConfig dark = config;
  dark.laser.power = 0.0;
  const TransientResult cooled = advance_transient(dark, steady.field, 0.5);
  CHECK(cooled.trace.front().peak_temperature == doctest::Approx(steady.peak_temperature));
  CHECK(cooled.trace.back().peak_temperature < steady.peak_temperature);
  CHECK(cooled.field.time == doctest::Approx(steady.field.time + 0.5).epsilon(1e-9));
}

TEST_CASE("steady search reports failure when the time budget is too small") {
  CaseConfig config = reference_case(1, 280.0);
  config.controls.max_time = 5e-3;
  CHECK_THROWS_AS(run_to_steady(config), NonConvergence);
}

TEST_CASE("spot vertex sits at the beam center on the lit surface") {
  const CaseConfig config = reference_case(2, 10.0);
  const int v = spot_vertex(*config.mesh, config.laser);
  const Vec3 p = config.mesh->vertices[static_cast<size_t>(v)];
  CHECK(p.x == doctest::Approx(0.0));
  CHECK(p.y == doctest::Approx(0.0));
  CHECK(p.z == doctest::Approx(8e-3).epsilon(1e-12));

  LaserSpec off_axis = config.laser;
  off_axis.center_x = 1.5e-3;  // rim of the disk
  const int rim = spot_vertex(*config.mesh, off_axis);
  const Vec3 q = config.mesh->vertices[static_cast<size_t>(rim)];
  CHECK(q.x > 1e-3);
  CHECK(q.z == doctest::Approx(8e-3).epsilon(1e-12));
}

TEST_CASE("solver controls are validated") {
  CaseConfig config = reference_case(1, 10.0);
  config.controls.newton_tol = 0.0;
  CHECK_THROWS(run_to_steady(config));
  config = reference_case(1, 10.0);
  config.controls.dt_growth = 0.5;
  CHECK_THROWS(run_to_steady(config));
}
