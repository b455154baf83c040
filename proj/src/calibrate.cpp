#include "tlesim/calibrate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <thread>

namespace tlesim {

namespace {

// Strided parallel map: worker t handles indices t, t + nthreads, ... and
// writes into preassigned slots, so results are position-deterministic.
// The lowest-index exception wins and is rethrown on the caller.
void parallel_for(int count, const std::function<void(int)>& body) {
  const int threads = std::min(calibration_thread_count(), count);
  if (threads <= 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::exception_ptr> errors(static_cast<size_t>(count));
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(threads));
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&, t]() {
      for (int i = t; i < count; i += threads) {
        try {
          body(i);
        } catch (...) {
          errors[static_cast<size_t>(i)] = std::current_exception();
        }
      }
    });
  }
  for (std::thread& worker : pool) worker.join();
  for (const std::exception_ptr& error : errors)
    if (error) std::rethrow_exception(error);
}

void set_reflectivity(CaseConfig& config, double value) {
  if (!(value >= 0.0) || value >= 1.0)
    throw std::invalid_argument("reflectivity must lie in [0, 1)");
  // Drop table entries the lookup would match first, so the override wins.
  auto& table = config.material.reflectivity;
  for (auto it = table.begin(); it != table.end();) {
    if (std::abs(it->first - config.laser.wavelength) <= 1e-9)
      it = table.erase(it);
    else
      ++it;
  }
  table[config.laser.wavelength] = value;
}

void set_emissivity(CaseConfig& config, double value) {
  if (!(value > 0.0) || value > 1.0)
    throw std::invalid_argument("emissivity must lie in (0, 1]");
  config.material.emissivity = value;
}

struct ParameterSetter {
  const char* canonical;
  const char* alias;
  void (*apply)(CaseConfig&, double);
};

void require_positive(double value, const char* what) {
  if (!(value > 0.0)) throw std::invalid_argument(std::string(what) + " must be positive");
}

const ParameterSetter kSetters[] = {
    {"thermal_conductivity", "kappa",
     [](CaseConfig& c, double v) {
       require_positive(v, "thermal_conductivity");
       c.material.thermal_conductivity = v;
     }},
    {"density", "rho",
     [](CaseConfig& c, double v) {
       require_positive(v, "density");
       c.material.density = v;
     }},
    {"specific_heat", "cp",
     [](CaseConfig& c, double v) {
       require_positive(v, "specific_heat");
       c.material.specific_heat = v;
     }},
    {"gaussian_radius", "omega",
     [](CaseConfig& c, double v) {
       require_positive(v, "gaussian_radius");
       c.laser.gaussian_radius = v;
     }},
    {"emissivity", "epsilon", [](CaseConfig& c, double v) { set_emissivity(c, v); }},
    {"reflectivity", "R", [](CaseConfig& c, double v) { set_reflectivity(c, v); }},
};

const ParameterSetter& find_setter(const std::string& name) {
  for (const ParameterSetter& s : kSetters)
    if (name == s.canonical || name == s.alias) return s;
  std::string known;
  for (const ParameterSetter& s : kSetters) {
    if (!known.empty()) known += ", ";
    known += s.canonical;
  }
  throw std::invalid_argument("unknown sweep parameter '" + name + "' (expected one of " +
                              known + ")");
}

double melting_delta(const SteadyProbe& probe, double melting_point) {
  return probe.peak_temperature - melting_point;
}

} // namespace

int calibration_thread_count() {
  const char* raw = std::getenv("TLESIM_THREADS");
  if (!raw) return 1;
  char* end = nullptr;
  const long parsed = std::strtol(raw, &end, 10);
  if (end == raw || parsed < 1) return 1;
  return static_cast<int>(std::min(parsed, 64L));
}

SteadyProbe probe_case(const CaseConfig& config) {
  const SteadyResult steady = run_to_steady(config);
  return {steady.peak_temperature, steady.mass_rate, steady.melted};
}

CellFn make_cell_evaluator(const CaseConfig& base) {
  return [base](double emissivity, double reflectivity) {
    CaseConfig config = base;
    set_emissivity(config, emissivity);
    set_reflectivity(config, reflectivity);
    return probe_case(config);
  };
}

PowerFn make_power_evaluator(const CaseConfig& base) {
  return [base](double power) {
    CaseConfig config = base;
    if (!(power >= 0.0)) throw std::invalid_argument("power must be non-negative");
    config.laser.power = power;
    return probe_case(config);
  };
}

RateFn make_rate_evaluator(const CaseConfig& base) {
  return [base](double emissivity, double reflectivity, double power) {
    CaseConfig config = base;
    set_emissivity(config, emissivity);
    set_reflectivity(config, reflectivity);
    if (!(power >= 0.0)) throw std::invalid_argument("power must be non-negative");
    config.laser.power = power;
    return probe_case(config);
  };
}

std::vector<std::string> sweep_parameter_names() {
  std::vector<std::string> names;
  for (const ParameterSetter& s : kSetters) names.emplace_back(s.canonical);
  return names;
}

SweepCurve sensitivity_sweep(const CaseConfig& base, const std::string& parameter,
                             const std::vector<double>& values) {
  const ParameterSetter& setter = find_setter(parameter);
  if (values.empty()) throw std::invalid_argument("sweep needs at least one value");

  SweepCurve curve;
  curve.parameter = setter.canonical;
  curve.points.resize(values.size());
  parallel_for(static_cast<int>(values.size()), [&](int i) {
    const double value = values[static_cast<size_t>(i)];
    try {
      CaseConfig config = base;
      setter.apply(config, value);
      const SteadyProbe probe = probe_case(config);
      curve.points[static_cast<size_t>(i)] = {value, probe.peak_temperature, probe.mass_rate};
    } catch (const std::exception& error) {
      std::ostringstream out;
      out << "sweep of " << setter.canonical << " at " << value << ": " << error.what();
      throw NonConvergence(out.str());
    }
  });
  return curve;
}

const ScanCell& ScanGrid::at(int row, int col) const {
  if (row < 0 || row >= rows() || col < 0 || col >= cols())
    throw std::out_of_range("scan cell index out of range");
  return cells[static_cast<size_t>(row * cols() + col)];
}

std::vector<double> default_epsilon_grid() {
  std::vector<double> grid;
  for (int i = 1; i <= 12; ++i) grid.push_back(0.05 * i);
  return grid;
}

std::vector<double> default_reflectivity_grid() {
  std::vector<double> grid;
  for (int i = 10; i <= 19; ++i) grid.push_back(0.05 * i);
  return grid;
}

ScanGrid scan_epsilon_reflectivity(const CellFn& evaluate, const std::vector<double>& epsilons,
                                   const std::vector<double>& reflectivities,
                                   double melting_point) {
  if (epsilons.empty() || reflectivities.empty())
    throw std::invalid_argument("scan grid must be nonempty");
  if (!std::is_sorted(epsilons.begin(), epsilons.end()) ||
      !std::is_sorted(reflectivities.begin(), reflectivities.end()))
    throw std::invalid_argument("scan grid values must be ascending");
  if (!(melting_point > 0.0)) throw std::invalid_argument("melting point must be positive");

  ScanGrid grid;
  grid.epsilon_values = epsilons;
  grid.reflectivity_values = reflectivities;
  grid.melting_point = melting_point;
  const int rows = grid.rows();
  const int cols = grid.cols();
  grid.cells.resize(static_cast<size_t>(rows * cols));

  parallel_for(rows * cols, [&](int index) {
    ScanCell& cell = grid.cells[static_cast<size_t>(index)];
    cell.emissivity = epsilons[static_cast<size_t>(index / cols)];
    cell.reflectivity = reflectivities[static_cast<size_t>(index % cols)];
    try {
      const SteadyProbe probe = evaluate(cell.emissivity, cell.reflectivity);
      cell.peak_temperature = probe.peak_temperature;
      cell.mass_rate = probe.mass_rate;
      cell.delta_t = melting_delta(probe, melting_point);
      cell.melted = probe.melted;
    } catch (const std::exception& error) {
      cell.failed = true;
      cell.message = error.what();
    }
  });
  return grid;
}

std::vector<NeutralPoint> extract_neutral_line(const ScanGrid& grid, const CellFn& evaluate,
                                               double tolerance_K, int max_bisections) {
  if (!(tolerance_K > 0.0)) throw std::invalid_argument("tolerance must be positive");
  if (grid.cells.size() != static_cast<size_t>(grid.rows() * grid.cols()))
    throw std::invalid_argument("scan grid is not fully populated");

  struct RowTask {
    double emissivity = 0.0;
    double lo = 0.0, hi = 0.0;       // reflectivity bracket
    bool direct = false;             // a grid cell already sits inside tolerance
    double direct_reflectivity = 0.0;
    double direct_delta = 0.0;
  };

  // Bracket per row from the grid; the crossing itself is re-solved.
  std::vector<RowTask> tasks;
  for (int i = 0; i < grid.rows(); ++i) {
    RowTask task;
    task.emissivity = grid.epsilon_values[static_cast<size_t>(i)];
    bool bracketed = false;
    for (int j = 0; j < grid.cols() && !bracketed; ++j) {
      const ScanCell& cell = grid.at(i, j);
      if (cell.failed) continue;
      if (std::abs(cell.delta_t) <= tolerance_K) {
        task.direct = true;
        task.direct_reflectivity = cell.reflectivity;
        task.direct_delta = cell.delta_t;
        bracketed = true;
        break;
      }
      if (j + 1 >= grid.cols()) break;
      const ScanCell& next = grid.at(i, j + 1);
      // Only adjacent valid pairs bracket; delta falls with reflectivity.
      if (!next.failed && cell.delta_t > 0.0 && next.delta_t < 0.0) {
        task.lo = cell.reflectivity;
        task.hi = next.reflectivity;
        bracketed = true;
      }
    }
    if (bracketed) tasks.push_back(task);
  }
  if (tasks.empty())
    throw NoSignChange("no scan row crosses the melting point; widen the grid");

  std::vector<NeutralPoint> line(tasks.size());
  parallel_for(static_cast<int>(tasks.size()), [&](int index) {
    const RowTask& task = tasks[static_cast<size_t>(index)];
    NeutralPoint point;
    point.emissivity = task.emissivity;
    if (task.direct) {
      point.reflectivity = task.direct_reflectivity;
      point.delta_t = task.direct_delta;
      line[static_cast<size_t>(index)] = point;
      return;
    }
    double lo = task.lo, hi = task.hi;
    double mid = 0.5 * (lo + hi);
    double delta = 0.0;
    int used = 0;
    for (; used < max_bisections; ++used) {
      mid = 0.5 * (lo + hi);
      delta = melting_delta(evaluate(task.emissivity, mid), grid.melting_point);
      if (std::abs(delta) <= tolerance_K) break;
      if (delta > 0.0)
        lo = mid;
      else
        hi = mid;
    }
    if (std::abs(delta) > tolerance_K)
      throw NonConvergence("neutral-line bisection stalled at emissivity " +
                           std::to_string(task.emissivity));
    point.reflectivity = mid;
    point.delta_t = delta;
    point.bisections = used + 1;
    line[static_cast<size_t>(index)] = point;
  });
  return line;
}

MeltingPowerResult find_melting_power(const PowerFn& evaluate, double target_K,
                                      double ambient_K, double power_max, double tolerance_K,
                                      int max_iterations) {
  if (!(tolerance_K > 0.0)) throw std::invalid_argument("tolerance must be positive");
  if (!(power_max > 0.0)) throw std::invalid_argument("power_max must be positive");

  MeltingPowerResult result;
  if (target_K <= ambient_K) {
    // Nothing to heat: the unlit source already sits at the target.
    result.power = 0.0;
    result.peak_temperature = ambient_K;
    return result;
  }

  const SteadyProbe top = evaluate(power_max);
  if (std::abs(top.peak_temperature - target_K) <= tolerance_K) {
    result.power = power_max;
    result.peak_temperature = top.peak_temperature;
    return result;
  }
  if (top.peak_temperature < target_K)
    throw NoBracket("peak temperature at " + std::to_string(power_max) + " W is " +
                    std::to_string(top.peak_temperature) + " K, below the target " +
                    std::to_string(target_K) + " K");

  double lo = 0.0, hi = power_max;
  for (int iteration = 0; iteration < max_iterations; ++iteration) {
    const double mid = 0.5 * (lo + hi);
    const SteadyProbe probe = evaluate(mid);
    result.iterations = iteration + 1;
    if (std::abs(probe.peak_temperature - target_K) <= tolerance_K) {
      result.power = mid;
      result.peak_temperature = probe.peak_temperature;
      result.brackets.push_back({lo, hi});
      return result;
    }
    if (probe.peak_temperature < target_K)
      lo = mid;
    else
      hi = mid;
    result.brackets.push_back({lo, hi});
  }
  throw NonConvergence("melting-power bisection did not reach " +
                       std::to_string(tolerance_K) + " K in " +
                       std::to_string(max_iterations) + " iterations");
}

ExperimentSeries load_experiment_series(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open experiment data file " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_experiment_series(buffer.str(), path);
}

ExperimentSeries parse_experiment_series(const std::string& text, const std::string& origin) {
  ExperimentSeries series;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  bool header_seen = false;
  bool has_sigma = false;

  auto fail = [&](const std::string& what) {
    throw std::runtime_error(origin + ":" + std::to_string(line_no) + ": " + what);
  };

  while (std::getline(in, line)) {
    ++line_no;
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    size_t start = line.find_first_not_of(" \t");
    if (start == std::string::npos) continue;
    if (line[start] == '#') {
      const size_t colon = line.find(':', start);
      if (colon == std::string::npos) continue;
      std::string key = line.substr(start + 1, colon - start - 1);
      std::string value = line.substr(colon + 1);
      const auto strip = [](std::string& s) {
        const size_t a = s.find_first_not_of(" \t");
        const size_t b = s.find_last_not_of(" \t");
        s = a == std::string::npos ? "" : s.substr(a, b - a + 1);
      };
      strip(key);
      strip(value);
      if (key == "element") {
        series.element = value;
      } else if (key == "diameter_mm") {
        series.diameter = std::stod(value) * 1e-3;
      } else if (key == "wavelength_nm") {
        series.wavelength = std::stod(value) * 1e-9;
      }
      continue;
    }
    if (!header_seen) {
      if (line.substr(start) == "power_W,rate_kg_per_s") {
        has_sigma = false;
      } else if (line.substr(start) == "power_W,rate_kg_per_s,sigma_kg_per_s") {
        has_sigma = true;
      } else {
        fail("expected header power_W,rate_kg_per_s[,sigma_kg_per_s]");
      }
      header_seen = true;
      continue;
    }
    std::istringstream row(line.substr(start));
    std::string field;
    std::vector<double> numbers;
    while (std::getline(row, field, ',')) {
      try {
        size_t used = 0;
        numbers.push_back(std::stod(field, &used));
      } catch (const std::exception&) {
        fail("malformed number '" + field + "'");
      }
    }
    if (numbers.size() != (has_sigma ? 3u : 2u)) fail("wrong number of columns");
    ExperimentPoint point;
    point.power = numbers[0];
    point.rate = numbers[1];
    point.sigma = has_sigma ? numbers[2] : 0.0;
    if (point.rate < 0.0) fail("negative rate");
    if (!series.points.empty() && point.power <= series.points.back().power)
      fail("powers must be strictly ascending");
    series.points.push_back(point);
  }
  if (!header_seen)
    throw std::runtime_error(origin + ": missing power_W,rate_kg_per_s header");
  if (series.points.empty()) throw std::runtime_error(origin + ": no data rows");
  return series;
}

std::vector<RateFit> fit_rate_curves(const std::vector<NeutralPoint>& candidates,
                                     const ExperimentSeries& data, const RateFn& evaluate) {
  if (candidates.empty()) throw std::invalid_argument("no fit candidates");
  int positive = 0;
  for (const ExperimentPoint& point : data.points)
    if (point.rate > 0.0) ++positive;
  if (positive < 2)
    throw std::invalid_argument("rate fitting needs at least two positive-rate data points");

  const int n_candidates = static_cast<int>(candidates.size());
  const int n_points = static_cast<int>(data.points.size());
  std::vector<double> rates(static_cast<size_t>(n_candidates * n_points), 0.0);
  parallel_for(n_candidates * n_points, [&](int index) {
    const NeutralPoint& candidate = candidates[static_cast<size_t>(index / n_points)];
    const ExperimentPoint& point = data.points[static_cast<size_t>(index % n_points)];
    try {
      rates[static_cast<size_t>(index)] =
          evaluate(candidate.emissivity, candidate.reflectivity, point.power).mass_rate;
    } catch (const std::exception&) {
      rates[static_cast<size_t>(index)] = 0.0;  // unsimulatable point contributes nothing
    }
  });

  std::vector<RateFit> fits(static_cast<size_t>(n_candidates));
  for (int c = 0; c < n_candidates; ++c) {
    RateFit& fit = fits[static_cast<size_t>(c)];
    fit.emissivity = candidates[static_cast<size_t>(c)].emissivity;
    fit.reflectivity = candidates[static_cast<size_t>(c)].reflectivity;
    fit.simulated_rates.assign(rates.begin() + c * n_points,
                               rates.begin() + (c + 1) * n_points);
    double sum = 0.0;
    int used = 0;
    for (int k = 0; k < n_points; ++k) {
      const double sim = fit.simulated_rates[static_cast<size_t>(k)];
      const double measured = data.points[static_cast<size_t>(k)].rate;
      if (sim > 0.0 && measured > 0.0) {
        const double diff = std::log10(sim) - std::log10(measured);
        sum += diff * diff;
        ++used;
      }
    }
    fit.residual = used > 0 ? sum / used : std::numeric_limits<double>::infinity();
  }

  bool any_finite = false;
  for (const RateFit& fit : fits)
    if (std::isfinite(fit.residual)) any_finite = true;
  if (!any_finite)
    throw std::runtime_error("no candidate produced a nonzero rate at the data powers");

  std::stable_sort(fits.begin(), fits.end(),
                   [](const RateFit& a, const RateFit& b) { return a.residual < b.residual; });
  return fits;
}

} // namespace tlesim
