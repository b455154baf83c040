#include "tlesim/solver.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include "tlesim/postprocess.hpp"

namespace tlesim {

namespace {

constexpr double kMinTemperature = 1.0;     // K, floor applied to Newton iterates
constexpr double kMinTimeStep = 1e-9;       // s
constexpr double kAbsoluteTol = 1e-10;      // W, used when there is no laser load
constexpr int kMaxHalvings = 8;

double norm2(const Eigen::VectorXd& v) { return v.norm(); }

void clamp_floor(std::vector<double>& T) {
  for (double& t : T) t = std::max(t, kMinTemperature);
}

double max_abs_rate(const std::vector<double>& now, const std::vector<double>& before,
                    double dt) {
  double peak = 0.0;
  for (size_t i = 0; i < now.size(); ++i)
    peak = std::max(peak, std::abs(now[i] - before[i]));
  return peak / dt;
}

} // namespace

struct LinearWorkspace {
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  bool analyzed = false;
};

void validate(const SolverControls& c) {
  if (!(c.newton_tol > 0.0)) throw std::invalid_argument("newton_tol must be positive");
  if (c.newton_max_iter < 1) throw std::invalid_argument("newton_max_iter must be at least 1");
  if (!(c.dt_initial > 0.0)) throw std::invalid_argument("dt_initial must be positive");
  if (!(c.dt_growth >= 1.0)) throw std::invalid_argument("dt_growth must be at least 1");
  if (!(c.dt_max > 0.0)) throw std::invalid_argument("dt_max must be positive");
  if (!(c.steady_rate_tol > 0.0)) throw std::invalid_argument("steady_rate_tol must be positive");
  if (!(c.steady_balance_tol > 0.0))
    throw std::invalid_argument("steady_balance_tol must be positive");
  if (!(c.max_time > 0.0)) throw std::invalid_argument("max_time must be positive");
}

double PowerBreakdown::balance_residual() const {
  return std::abs(absorbed - radiated - evaporated) / std::max(absorbed, 1e-9);
}

NewtonReport solve_nonlinear(const ThermalSystem& system, std::vector<double>& T,
                             const std::vector<double>& T_prev, double dt, double optical_depth,
                             const SolverControls& controls, LinearWorkspace* workspace) {
  const int n = system.mesh().num_vertices();
  if (static_cast<int>(T.size()) != n || static_cast<int>(T_prev.size()) != n)
    throw std::invalid_argument("solve_nonlinear: state size does not match mesh");

  LinearWorkspace local;
  LinearWorkspace& ws = workspace ? *workspace : local;

  const double load_norm = norm2(system.laser_load(optical_depth));
  const bool scaled = load_norm > 0.0;
  const double tol = scaled ? controls.newton_tol : kAbsoluteTol;
  const auto measure = [&](const Eigen::VectorXd& r) {
    return scaled ? norm2(r) / load_norm : norm2(r);
  };

  NewtonReport report;
  Eigen::VectorXd residual(n);
  Eigen::SparseMatrix<double> jacobian(n, n);
  Eigen::VectorXd trial_residual(n);
  std::vector<double> trial(static_cast<size_t>(n));

  clamp_floor(T);
  system.assemble(T, T_prev, dt, optical_depth, residual, &jacobian);
  double norm = measure(residual);
  report.residual_history.push_back(norm);

  for (int iter = 0; iter < controls.newton_max_iter; ++iter) {
    if (norm <= tol) {
      report.iterations = iter;
      return report;
    }

    if (!ws.analyzed) {
      ws.lu.analyzePattern(jacobian);
      ws.analyzed = true;
    }
    ws.lu.factorize(jacobian);
    if (ws.lu.info() != Eigen::Success)
      throw NonConvergence("linear solve failed: singular thermal Jacobian");
    const Eigen::VectorXd delta = ws.lu.solve(-residual);
    if (ws.lu.info() != Eigen::Success)
      throw NonConvergence("linear solve failed during back substitution");

    // Step halving: accept the first damped step that reduces the
    // residual, otherwise fall through with the smallest step tried.
    double alpha = 1.0;
    double trial_norm = 0.0;
    for (int halving = 0; halving <= kMaxHalvings; ++halving) {
      for (int i = 0; i < n; ++i)
        trial[static_cast<size_t>(i)] =
            std::max(T[static_cast<size_t>(i)] + alpha * delta[i], kMinTemperature);
      system.assemble(trial, T_prev, dt, optical_depth, trial_residual, nullptr);
      trial_norm = measure(trial_residual);
      if (trial_norm < norm || halving == kMaxHalvings) break;
      alpha *= 0.5;
    }

    T = trial;
    norm = trial_norm;
    report.residual_history.push_back(norm);
    if (norm <= tol) {
      report.iterations = iter + 1;
      return report;
    }
    system.assemble(T, T_prev, dt, optical_depth, residual, &jacobian);
  }

  throw NonConvergence("Newton iteration did not reach tolerance " + std::to_string(tol) +
                       " in " + std::to_string(controls.newton_max_iter) + " iterations");
}

int spot_vertex(const Mesh& mesh, const LaserSpec& laser) {
  std::set<int> top;
  for (const BoundaryFacet& facet : mesh.facets)
    if (facet.tag == BoundaryTag::TopSurface)
      for (int k = 0; k < 3; ++k) top.insert(facet.v[k]);
  if (top.empty()) throw std::invalid_argument("mesh has no top surface");
  int best = -1;
  double best_d2 = 0.0;
  for (int v : top) {
    const double dx = mesh.vertices[v].x - laser.center_x;
    const double dy = mesh.vertices[v].y - laser.center_y;
    const double d2 = dx * dx + dy * dy;
    if (best < 0 || d2 < best_d2) {
      best = v;
      best_d2 = d2;
    }
  }
  return best;
}

namespace {

struct Stepper {
  const CaseConfig& config;
  const ThermalSystem& system;
  LinearWorkspace& workspace;
  std::vector<double>& T;
  double& time;
  double& dt;
  std::vector<StepRecord>& history;

  // Takes one backward-Euler step of at most dt_cap seconds, halving the
  // step on Newton failure. Returns the record of the accepted step.
  StepRecord step(double dt_cap) {
    const SolverControls& controls = config.controls;
    for (;;) {
      const double dt_step = std::min({dt, dt_cap, controls.dt_max});
      double tau = 0.0;
      if (system.laser().attenuation_enabled && system.laser().power > 0.0) {
        const double surface_peak = system.peak_boundary_temperature(T);
        tau = optical_depth(config.material, surface_peak, system.laser(), config.chamber);
      }
      std::vector<double> T_new = T;
      try {
        const NewtonReport newton =
            solve_nonlinear(system, T_new, T, dt_step, tau, controls, &workspace);
        StepRecord record;
        record.time = time + dt_step;
        record.dt = dt_step;
        record.newton_iterations = newton.iterations;
        record.max_rate = max_abs_rate(T_new, T, dt_step);
        record.optical_depth = tau;

        TemperatureField probe;
        probe.mesh = config.mesh;
        probe.values = T_new;
        probe.time = record.time;
        const BoundaryPowers powers = integrate_boundary_powers(
            probe, config.material, system.laser(), config.chamber, tau);
        PowerBreakdown breakdown{powers.absorbed, powers.radiated, powers.evaporated};
        record.balance_residual = breakdown.balance_residual();

        T = std::move(T_new);
        time = record.time;
        history.push_back(record);
        dt = std::min(dt * controls.dt_growth, controls.dt_max);
        return record;
      } catch (const NonConvergence&) {
        dt = dt_step * 0.5;
        if (dt < kMinTimeStep)
          throw NonConvergence("time step underflow below 1 ns at t = " +
                               std::to_string(time) + " s");
      }
    }
  }
};

void check_case(const CaseConfig& config) {
  if (!config.mesh) throw std::invalid_argument("case has no mesh");
  validate(config.controls);
}

} // namespace

TransientResult advance_transient(const CaseConfig& config, const TemperatureField& initial,
                                  double duration, double laser_off_time) {
  check_case(config);
  if (!(duration > 0.0)) throw std::invalid_argument("duration must be positive");
  if (initial.mesh != config.mesh)
    throw std::invalid_argument("initial field is defined on a different mesh");
  if (static_cast<int>(initial.values.size()) != config.mesh->num_vertices())
    throw std::invalid_argument("initial field size does not match mesh");

  const ThermalSystem system_on(config.mesh, config.material, config.laser, config.chamber);
  LaserSpec off = config.laser;
  off.power = 0.0;
  const ThermalSystem system_off(config.mesh, config.material, off, config.chamber);

  const double t_end = initial.time + duration;

  TransientResult result;
  result.field.mesh = config.mesh;
  result.field.values = initial.values;
  result.field.time = initial.time;

  const int probe = spot_vertex(*config.mesh, config.laser);
  const auto sample = [&](double t, const std::vector<double>& T) {
    TraceSample s;
    s.time = t;
    s.spot_temperature = T[static_cast<size_t>(probe)];
    s.peak_temperature = *std::max_element(T.begin(), T.end());
    result.trace.push_back(s);
  };

  double time = initial.time;
  double dt = config.controls.dt_initial;
  LinearWorkspace workspace;
  sample(time, result.field.values);

  const double t_tol = 1e-12 * std::max(1.0, std::abs(t_end));
  while (time < t_end - t_tol) {
    // Steps never straddle the switch-off instant: while the laser is on
    // the step is capped at the edge, afterwards the dark system is used.
    const bool lit = time < laser_off_time - t_tol;
    double cap = t_end - time;
    if (lit) cap = std::min(cap, laser_off_time - time);
    const ThermalSystem& system = lit ? system_on : system_off;
    Stepper stepper{config, system, workspace, result.field.values, time, dt, result.history};
    stepper.step(cap);
    sample(time, result.field.values);
  }

  result.field.time = time;
  return result;
}

SteadyResult run_to_steady(const CaseConfig& config) {
  check_case(config);
  const ThermalSystem system(config.mesh, config.material, config.laser, config.chamber);
  const SolverControls& controls = config.controls;

  SteadyResult result;
  result.field = uniform_field(config.mesh, config.chamber.ambient_temperature);

  if (config.laser.power == 0.0) {
    // Nothing drives the system away from ambient.
    const auto [peak, vertex] = peak_temperature(result.field);
    result.peak_temperature = peak;
    result.peak_vertex = vertex;
    result.mass_rate = total_mass_evaporation_rate(result.field, config.material);
    result.melted = peak >= config.material.melting_point;
    const BoundaryPowers powers = integrate_boundary_powers(result.field, config.material,
                                                            config.laser, config.chamber, 0.0);
    result.power = {powers.absorbed, powers.radiated, powers.evaporated};
    return result;
  }

  double time = 0.0;
  double dt = controls.dt_initial;
  LinearWorkspace workspace;
  double tau = 0.0;

  for (;;) {
    if (time >= controls.max_time)
      throw NonConvergence("no steady state within " + std::to_string(controls.max_time) +
                           " s of simulated time");
    Stepper stepper{config, system, workspace, result.field.values, time, dt, result.history};
    const StepRecord record = stepper.step(controls.max_time);
    tau = record.optical_depth;
    if (record.max_rate <= controls.steady_rate_tol &&
        record.balance_residual <= controls.steady_balance_tol)
      break;
  }

  result.field.time = time;
  result.final_time = time;
  const auto [peak, vertex] = peak_temperature(result.field);
  result.peak_temperature = peak;
  result.peak_vertex = vertex;
  result.mass_rate = total_mass_evaporation_rate(result.field, config.material);
  result.melted = peak >= config.material.melting_point;
  const BoundaryPowers powers =
      integrate_boundary_powers(result.field, config.material, config.laser, config.chamber, tau);
  result.power = {powers.absorbed, powers.radiated, powers.evaporated};
  return result;
}

} // namespace tlesim
