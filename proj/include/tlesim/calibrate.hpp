#pragma once

#include <array>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "tlesim/solver.hpp"

namespace tlesim {

// The slice of a steady solve the calibration drivers consume.
struct SteadyProbe {
  double peak_temperature = 0.0;
  double mass_rate = 0.0;  // kg/s
  bool melted = false;
};

// Injected evaluators. The factories below run full solves; tests swap in
// closed-form stand-ins. Evaluators must tolerate concurrent calls: the
// drivers fan cells out over TLESIM_THREADS worker threads (default 1)
// and write each result into its own slot, so output order never depends
// on scheduling.
using CellFn = std::function<SteadyProbe(double emissivity, double reflectivity)>;
using PowerFn = std::function<SteadyProbe(double power)>;
using RateFn = std::function<SteadyProbe(double emissivity, double reflectivity, double power)>;

SteadyProbe probe_case(const CaseConfig& config);
CellFn make_cell_evaluator(const CaseConfig& base);
PowerFn make_power_evaluator(const CaseConfig& base);
RateFn make_rate_evaluator(const CaseConfig& base);

int calibration_thread_count();  // TLESIM_THREADS, clamped to >= 1

// ---------------------------------------------------------------------------
// Sensitivity sweeps

struct SweepPoint {
  double value = 0.0;
  double peak_temperature = 0.0;
  double mass_rate = 0.0;
};

struct SweepCurve {
  std::string parameter;
  std::vector<SweepPoint> points;  // in input order
};

// One steady solve per value with every other input held fixed. The
// parameter is one of thermal_conductivity, density, specific_heat,
// gaussian_radius, emissivity, reflectivity (aliases kappa, rho, cp,
// omega, epsilon, R). Solver failures are rethrown annotated with the
// offending value.
SweepCurve sensitivity_sweep(const CaseConfig& base, const std::string& parameter,
                             const std::vector<double>& values);

std::vector<std::string> sweep_parameter_names();

// ---------------------------------------------------------------------------
// (emissivity, reflectivity) parameter-space scan

struct ScanCell {
  double emissivity = 0.0;
  double reflectivity = 0.0;
  double peak_temperature = 0.0;
  double mass_rate = 0.0;
  double delta_t = 0.0;  // peak - melting point, K
  bool melted = false;
  bool failed = false;   // solver failure; other cells unaffected
  std::string message;
};

struct ScanGrid {
  std::vector<double> epsilon_values;       // ascending, rows
  std::vector<double> reflectivity_values;  // ascending, columns
  double melting_point = 0.0;
  std::vector<ScanCell> cells;              // row-major

  const ScanCell& at(int row, int col) const;
  int rows() const { return static_cast<int>(epsilon_values.size()); }
  int cols() const { return static_cast<int>(reflectivity_values.size()); }
};

ScanGrid scan_epsilon_reflectivity(const CellFn& evaluate, const std::vector<double>& epsilons,
                                   const std::vector<double>& reflectivities,
                                   double melting_point);

// The default scan rectangle, covering the literature range with margin.
std::vector<double> default_epsilon_grid();       // 0.05 .. 0.60 step 0.05
std::vector<double> default_reflectivity_grid();  // 0.50 .. 0.95 step 0.05

// ---------------------------------------------------------------------------
// Neutral line: (emissivity, reflectivity) pairs whose steady peak sits at
// the melting point for the calibration power.

struct NoSignChange : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NeutralPoint {
  double emissivity = 0.0;
  double reflectivity = 0.0;
  double delta_t = 0.0;  // residual peak - melt at the returned pair, K
  int bisections = 0;
};

// For every grid row whose delta_t changes sign across a column pair, the
// crossing reflectivity is located by bisection with fresh solves until
// |delta_t| <= tolerance_K. Rows without a sign change are skipped; if no
// row has one, NoSignChange is thrown. Points come back in ascending
// emissivity.
std::vector<NeutralPoint> extract_neutral_line(const ScanGrid& grid, const CellFn& evaluate,
                                               double tolerance_K = 2.0, int max_bisections = 60);

// ---------------------------------------------------------------------------
// Melting-power search

struct NoBracket : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct MeltingPowerResult {
  double power = 0.0;
  double peak_temperature = 0.0;
  int iterations = 0;
  std::vector<std::array<double, 2>> brackets;  // [low, high] after each iteration
};

// Bisects laser power until the steady peak is within tolerance_K of the
// target. A target at or below the ambient temperature answers 0 W.
// Throws NoBracket when power_max still undershoots the target.
MeltingPowerResult find_melting_power(const PowerFn& evaluate, double target_K,
                                      double ambient_K, double power_max = 2000.0,
                                      double tolerance_K = 5.0, int max_iterations = 60);

// ---------------------------------------------------------------------------
// Experimental rate curves

struct ExperimentPoint {
  double power = 0.0;  // W
  double rate = 0.0;   // kg/s
  double sigma = 0.0;  // kg/s, 0 when the file has no uncertainty column
};

struct ExperimentSeries {
  std::string element;
  double diameter = 0.0;    // m
  double wavelength = 0.0;  // m
  std::vector<ExperimentPoint> points;  // strictly ascending power
};

// CSV with a "# key: value" preamble (element, diameter_mm, wavelength_nm)
// and a "power_W,rate_kg_per_s[,sigma_kg_per_s]" header.
ExperimentSeries load_experiment_series(const std::string& path);
ExperimentSeries parse_experiment_series(const std::string& text, const std::string& origin);

struct RateFit {
  double emissivity = 0.0;
  double reflectivity = 0.0;
  double residual = 0.0;                 // mean squared log10 rate mismatch
  std::vector<double> simulated_rates;   // kg/s, one per experimental point
};

// Simulates each candidate's rate curve at the experimental powers and
// ranks candidates by mean squared difference of log10(rate) over points
// where both rates are positive. Candidates whose curve never overlaps the
// data rank last with an infinite residual.
std::vector<RateFit> fit_rate_curves(const std::vector<NeutralPoint>& candidates,
                                     const ExperimentSeries& data, const RateFn& evaluate);

} // namespace tlesim
