#pragma once

#include <limits>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "tlesim/assembly.hpp"
#include "tlesim/field.hpp"

namespace tlesim {

struct SolverControls {
  double newton_tol = 1e-8;        // relative to the laser load norm
  int newton_max_iter = 25;
  double dt_initial = 1e-3;        // s
  double dt_growth = 1.5;
  double dt_max = 1.0;             // s
  double steady_rate_tol = 1e-3;   // K/s, max nodal rate
  double steady_balance_tol = 1e-2;
  double max_time = 600.0;         // s of simulated time
};

void validate(const SolverControls& controls);

// A fully resolved simulation case: mesh, material record, beam, chamber,
// controls. Values here are the single source of truth for a solve.
struct CaseConfig {
  std::shared_ptr<const Mesh> mesh;
  Material material;
  LaserSpec laser;
  ChamberSpec chamber;
  SolverControls controls;
};

struct NonConvergence : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NewtonReport {
  int iterations = 0;
  std::vector<double> residual_history;  // scaled norms, includes the initial one
};

// Workspace reused across steps so the sparse pattern is analyzed once.
struct LinearWorkspace;

// Damped Newton solve of one backward-Euler step: on entry T holds the
// predictor (usually T_prev), on exit the converged solution. Updates use
// step halving on residual growth (at most 8 halvings) and a 1 K floor.
// Throws NonConvergence when newton_max_iter is exhausted or the linear
// solver fails.
NewtonReport solve_nonlinear(const ThermalSystem& system, std::vector<double>& T,
                             const std::vector<double>& T_prev, double dt, double optical_depth,
                             const SolverControls& controls, LinearWorkspace* workspace = nullptr);

struct StepRecord {
  double time = 0.0;  // end of step
  double dt = 0.0;
  int newton_iterations = 0;
  double max_rate = 0.0;           // K/s
  double balance_residual = 0.0;   // relative
  double optical_depth = 0.0;
};

struct PowerBreakdown {
  double absorbed = 0.0;
  double radiated = 0.0;
  double evaporated = 0.0;
  double balance_residual() const;
};

struct TraceSample {
  double time = 0.0;
  double spot_temperature = 0.0;
  double peak_temperature = 0.0;
};

struct TransientResult {
  TemperatureField field;
  std::vector<TraceSample> trace;
  std::vector<StepRecord> history;
};

struct SteadyResult {
  TemperatureField field;
  double peak_temperature = 0.0;
  int peak_vertex = -1;
  double mass_rate = 0.0;  // kg/s
  bool melted = false;
  PowerBreakdown power;
  std::vector<StepRecord> history;
  double final_time = 0.0;
};

// Advances from `initial` over `duration` seconds with adaptive steps
// (grow on success, halve on Newton failure; below 1 ns the step aborts).
// The laser switches off permanently at laser_off_time. The trace samples
// the vertex nearest the spot center on the top surface after every step.
TransientResult advance_transient(const CaseConfig& config, const TemperatureField& initial,
                                  double duration,
                                  double laser_off_time = std::numeric_limits<double>::infinity());

// Steps from uniform ambient until both steady criteria hold: max nodal
// |dT/dt| <= steady_rate_tol and relative power imbalance
// |absorbed - radiated - evaporated| / absorbed <= steady_balance_tol.
// Throws NonConvergence if max_time passes first.
SteadyResult run_to_steady(const CaseConfig& config);

int spot_vertex(const Mesh& mesh, const LaserSpec& laser);

} // namespace tlesim
