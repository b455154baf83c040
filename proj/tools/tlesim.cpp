// tlesim: command-line driver for the laser-heating simulator.
//
// Subcommands: mesh, steady, transient, sweep, scan, neutral-line,
// melt-power, fit, optical-depth, materials. Config files use laboratory
// units in their field names (power_W, omega_um, diameter_mm); everything
// internal is SI. Exit codes: 0 success, 1 usage error, 2 solver
// non-convergence, 3 I/O or parse error.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "tlesim/calibrate.hpp"
#include "tlesim/config_io.hpp"
#include "tlesim/constants.hpp"
#include "tlesim/gmsh_io.hpp"
#include "tlesim/material.hpp"
#include "tlesim/mesh.hpp"
#include "tlesim/physics.hpp"
#include "tlesim/postprocess.hpp"
#include "tlesim/solver.hpp"
#include "tlesim/vtk_io.hpp"

namespace {

using nlohmann::ordered_json;
using namespace tlesim;

std::string fmt17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

ordered_json finite_or_string(double v) {
  if (std::isfinite(v)) return v;
  return v > 0 ? "infinity" : "-infinity";
}

// "lo:hi:step" -> inclusive ascending values. Used for --temps and the scan
// grid flags.
std::vector<double> parse_range(const std::string& text, const std::string& flag) {
  double lo = 0, hi = 0, step = 0;
  char tail = 0;
  if (std::sscanf(text.c_str(), "%lf:%lf:%lf%c", &lo, &hi, &step, &tail) != 3) {
    throw ConfigError(flag + ": expected lo:hi:step, got \"" + text + "\"");
  }
  if (step <= 0) throw ConfigError(flag + ": step must be positive");
  if (hi < lo) throw ConfigError(flag + ": upper bound below lower bound");
  if ((hi - lo) / step > 1e5) throw ConfigError(flag + ": more than 100000 values");
  std::vector<double> values;
  for (double v = lo; v <= hi + 0.5 * step; v += step) values.push_back(std::min(v, hi));
  if (!values.empty() && values.back() < hi - 1e-9 * step) values.push_back(hi);
  return values;
}

std::vector<double> parse_value_list(const std::string& text, const std::string& flag) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      size_t used = 0;
      values.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError(flag + ": \"" + item + "\" is not a number");
    }
  }
  if (values.empty()) throw ConfigError(flag + ": no values given");
  return values;
}

std::filesystem::path ensure_output_dir(const RunConfig& run) {
  std::filesystem::path dir(run.output_dir);
  std::filesystem::create_directories(dir);
  return dir;
}

// The run manifest plus the subcommand's own arguments, so a run can be
// reproduced from the manifest alone.
void write_manifest(const RunConfig& run, const CaseConfig& resolved, const std::string& command,
                    const ordered_json& arguments, const std::filesystem::path& dir) {
  ordered_json m = ordered_json::parse(run_manifest_json(run, resolved, command));
  m["arguments"] = arguments;
  write_text_file((dir / "run_manifest.json").string(), m.dump(2) + "\n");
}

ordered_json steady_result_json(const SteadyResult& steady, const CaseConfig& resolved) {
  MeltPool pool = melt_pool(steady.field, resolved.material);
  Vec3 at = resolved.mesh->vertices[steady.peak_vertex];
  ordered_json out;
  out["peak_T_K"] = steady.peak_temperature;
  out["peak_vertex"] = steady.peak_vertex;
  out["peak_location_m"] = ordered_json{{"x", at.x}, {"y", at.y}, {"z", at.z}};
  out["melted"] = steady.melted;
  out["mass_rate_kg_per_s"] = steady.mass_rate;
  out["mass_rate_mg_per_min"] = kg_per_s_to_mg_per_min(steady.mass_rate);
  out["power_balance_W"] = ordered_json{{"absorbed", steady.power.absorbed},
                                        {"radiated", steady.power.radiated},
                                        {"evaporated", steady.power.evaporated},
                                        {"relative_residual", steady.power.balance_residual()}};
  out["melt_pool"] = ordered_json{{"area_m2", pool.area},
                                  {"facet_count", pool.facet_count},
                                  {"any_molten", pool.any_molten}};
  out["final_time_s"] = steady.final_time;
  out["steps"] = steady.history.size();
  out["optical_depth_final"] =
      steady.history.empty() ? 0.0 : steady.history.back().optical_depth;
  return out;
}

// ---------------------------------------------------------------------------
// Subcommand bodies. Each returns the process exit code.

int cmd_mesh(const std::string& config_path) {
  RunConfig run = load_run_config(config_path);
  CaseConfig resolved = resolve_case(run);
  auto dir = ensure_output_dir(run);
  write_gmsh_mesh(*resolved.mesh, (dir / "mesh.msh").string());
  QualityReport q = mesh_quality_report(*resolved.mesh);
  ordered_json report;
  report["node_count"] = q.node_count;
  report["element_count"] = q.element_count;
  report["boundary_facet_count"] = resolved.mesh->num_facets();
  report["total_volume_m3"] = q.total_volume;
  report["min_tet_volume_m3"] = q.min_tet_volume;
  report["max_tet_volume_m3"] = q.max_tet_volume;
  report["min_dihedral_deg"] = q.min_dihedral_deg;
  report["area_top_surface_m2"] = q.area_top_surface;
  report["area_surface_m2"] = q.area_surface;
  write_text_file((dir / "mesh_report.json").string(), report.dump(2) + "\n");
  write_manifest(run, resolved, "mesh", ordered_json::object(), dir);
  std::cout << "wrote " << (dir / "mesh.msh").string() << " (" << q.element_count
            << " tets, " << q.node_count << " nodes)\n";
  return 0;
}

int cmd_steady(const std::string& config_path) {
  RunConfig run = load_run_config(config_path);
  CaseConfig resolved = resolve_case(run);
  auto dir = ensure_output_dir(run);
  write_manifest(run, resolved, "steady", ordered_json::object(), dir);
  SteadyResult steady = run_to_steady(resolved);
  write_text_file((dir / "steady_result.json").string(),
                  steady_result_json(steady, resolved).dump(2) + "\n");
  export_vtk(steady.field, (dir / "field.vtk").string());
  std::cout << "peak_T_K " << fmt17(steady.peak_temperature) << " melted "
            << (steady.melted ? 1 : 0) << " mass_rate_kg_per_s " << fmt17(steady.mass_rate)
            << "\n";
  return 0;
}

int cmd_transient(const std::string& config_path, double duration, double laser_off) {
  if (duration <= 0) throw ConfigError("--duration-s must be positive");
  RunConfig run = load_run_config(config_path);
  CaseConfig resolved = resolve_case(run);
  auto dir = ensure_output_dir(run);
  ordered_json args{{"duration_s", duration},
                    {"laser_off_s", finite_or_string(laser_off)}};
  write_manifest(run, resolved, "transient", args, dir);
  TemperatureField initial =
      uniform_field(resolved.mesh, resolved.chamber.ambient_temperature, 0.0);
  TransientResult result = advance_transient(resolved, initial, duration, laser_off);
  std::string csv = "time_s,spot_T_K,peak_T_K\n";
  for (const TraceSample& s : result.trace) {
    csv += fmt17(s.time) + "," + fmt17(s.spot_temperature) + "," + fmt17(s.peak_temperature) +
           "\n";
  }
  write_text_file((dir / "transient_trace.csv").string(), csv);
  export_vtk(result.field, (dir / "field.vtk").string());
  std::cout << "steps " << result.history.size() << " final_spot_T_K "
            << fmt17(result.trace.back().spot_temperature) << "\n";
  return 0;
}

int cmd_sweep(const std::string& config_path, const std::string& parameter,
              const std::string& values_text) {
  // Validate the name before touching the config or the output directory, so
  // a typo cannot leave a manifest behind for a sweep that never ran. "power"
  // is a CLI-level axis; the rest map onto the library sensitivity sweep.
  static const std::vector<std::string> known{
      "power",        "thermal_conductivity", "kappa", "density",    "rho",
      "specific_heat", "cp",                  "gaussian_radius", "omega",
      "emissivity",   "epsilon",              "reflectivity",    "R"};
  if (std::find(known.begin(), known.end(), parameter) == known.end())
    throw ConfigError("--parameter: unknown name \"" + parameter +
                      "\" (expected kappa, rho, cp, omega, epsilon, R, power, or a long form "
                      "thermal_conductivity, density, specific_heat, gaussian_radius)");
  RunConfig run = load_run_config(config_path);
  CaseConfig resolved = resolve_case(run);
  auto dir = ensure_output_dir(run);
  std::vector<double> values = parse_value_list(values_text, "--values");

  ordered_json args{{"parameter", parameter}, {"values", values}};
  write_manifest(run, resolved, "sweep", args, dir);

  std::string path = (dir / ("sweep_" + parameter + ".csv")).string();
  if (parameter == "power") {
    // Laser-power sweep: the simulated evaporation-rate table.
    PowerFn probe = make_power_evaluator(resolved);
    std::vector<SteadyProbe> rows(values.size());
    for (size_t i = 0; i < values.size(); ++i) {
      if (values[i] < 0) throw ConfigError("--values: negative laser power");
      rows[i] = probe(values[i]);
    }
    std::string csv = "power_W,mass_rate_kg_s,mass_rate_mg_min,peak_T_K,melted\n";
    for (size_t i = 0; i < values.size(); ++i) {
      csv += fmt17(values[i]) + "," + fmt17(rows[i].mass_rate) + "," +
             fmt17(kg_per_s_to_mg_per_min(rows[i].mass_rate)) + "," +
             fmt17(rows[i].peak_temperature) + "," + (rows[i].melted ? "1" : "0") + "\n";
    }
    write_text_file(path, csv);
  } else {
    // gaussian_radius arrives in micrometres on the command line.
    std::vector<double> si = values;
    if (parameter == "omega" || parameter == "gaussian_radius") {
      for (double& v : si) v *= 1e-6;
    }
    SweepCurve curve = sensitivity_sweep(resolved, parameter, si);
    std::string csv = "value,peak_T_K,mass_rate_kg_s,mass_rate_mg_min\n";
    for (size_t i = 0; i < curve.points.size(); ++i) {
      csv += fmt17(values[i]) + "," + fmt17(curve.points[i].peak_temperature) + "," +
             fmt17(curve.points[i].mass_rate) + "," +
             fmt17(kg_per_s_to_mg_per_min(curve.points[i].mass_rate)) + "\n";
    }
    write_text_file(path, csv);
  }
  std::cout << "wrote " << path << "\n";
  return 0;
}

ordered_json neutral_line_json(const std::vector<NeutralPoint>& line) {
  ordered_json arr = ordered_json::array();
  for (const NeutralPoint& p : line) {
    arr.push_back(ordered_json{{"epsilon", p.emissivity},
                               {"reflectivity", p.reflectivity},
                               {"delta_T_K", p.delta_t},
                               {"bisections", p.bisections}});
  }
  return arr;
}

ordered_json ranked_fits_json(const std::vector<RateFit>& fits) {
  ordered_json arr = ordered_json::array();
  for (const RateFit& f : fits) {
    arr.push_back(ordered_json{{"epsilon", f.emissivity},
                               {"reflectivity", f.reflectivity},
                               {"residual", finite_or_string(f.residual)},
                               {"simulated_rates_kg_per_s", f.simulated_rates}});
  }
  return arr;
}

int cmd_scan(const std::string& config_path, const std::string& eps_range,
             const std::string& refl_range, const std::string& data_path, double tol_K) {
  RunConfig run = load_run_config(config_path);
  CaseConfig resolved = resolve_case(run);
  auto dir = ensure_output_dir(run);
  std::vector<double> epsilons =
      eps_range.empty() ? default_epsilon_grid() : parse_range(eps_range, "--epsilon");
  std::vector<double> reflectivities =
      refl_range.empty() ? default_reflectivity_grid() : parse_range(refl_range, "--reflectivity");

  ordered_json args{{"epsilon_values", epsilons},
                    {"reflectivity_values", reflectivities},
                    {"neutral_tolerance_K", tol_K},
                    {"data_file", data_path.empty() ? ordered_json(nullptr) : ordered_json(data_path)}};
  write_manifest(run, resolved, "scan", args, dir);

  CellFn cell = make_cell_evaluator(resolved);
  ScanGrid grid =
      scan_epsilon_reflectivity(cell, epsilons, reflectivities, resolved.material.melting_point);

  // Grid CSV: rows are emissivity, columns reflectivity, cells peak - melt.
  std::string csv = "epsilon";
  for (double r : grid.reflectivity_values) csv += "," + fmt17(r);
  csv += "\n";
  for (int i = 0; i < grid.rows(); ++i) {
    csv += fmt17(grid.epsilon_values[i]);
    for (int j = 0; j < grid.cols(); ++j) {
      const ScanCell& c = grid.at(i, j);
      csv += ",";
      csv += c.failed ? "nan" : fmt17(c.delta_t);
    }
    csv += "\n";
  }
  write_text_file((dir / "scan_grid.csv").string(), csv);

  ordered_json summary;
  summary["melting_point_K"] = grid.melting_point;
  summary["epsilon_values"] = grid.epsilon_values;
  summary["reflectivity_values"] = grid.reflectivity_values;
  ordered_json cells = ordered_json::array();
  for (const ScanCell& c : grid.cells) {
    cells.push_back(ordered_json{{"epsilon", c.emissivity},
                                 {"reflectivity", c.reflectivity},
                                 {"peak_T_K", c.peak_temperature},
                                 {"delta_T_K", c.delta_t},
                                 {"mass_rate_kg_per_s", c.mass_rate},
                                 {"melted", c.melted},
                                 {"failed", c.failed},
                                 {"message", c.message}});
  }
  summary["cells"] = cells;

  std::vector<NeutralPoint> line;
  try {
    line = extract_neutral_line(grid, cell, tol_K);
    summary["neutral_line"] = neutral_line_json(line);
  } catch (const NoSignChange& e) {
    summary["neutral_line"] = ordered_json::array();
    summary["neutral_line_note"] = e.what();
  }

  if (!data_path.empty() && !line.empty()) {
    ExperimentSeries data = load_experiment_series(data_path);
    RateFn rate = make_rate_evaluator(resolved);
    summary["ranked_fits"] = ranked_fits_json(fit_rate_curves(line, data, rate));
    summary["data_file"] = data_path;
  } else {
    summary["ranked_fits"] = ordered_json::array();
  }
  write_text_file((dir / "scan_summary.json").string(), summary.dump(2) + "\n");
  std::cout << "scan " << grid.rows() << "x" << grid.cols() << " cells, neutral line "
            << line.size() << " points\n";
  return 0;
}

int cmd_neutral_line(const std::string& config_path, const std::string& eps_range,
                     const std::string& refl_range, double tol_K) {
  RunConfig run = load_run_config(config_path);
  CaseConfig resolved = resolve_case(run);
  auto dir = ensure_output_dir(run);
  std::vector<double> epsilons =
      eps_range.empty() ? default_epsilon_grid() : parse_range(eps_range, "--epsilon");
  std::vector<double> reflectivities =
      refl_range.empty() ? default_reflectivity_grid() : parse_range(refl_range, "--reflectivity");
  ordered_json args{{"epsilon_values", epsilons},
                    {"reflectivity_values", reflectivities},
                    {"neutral_tolerance_K", tol_K}};
  write_manifest(run, resolved, "neutral-line", args, dir);

  CellFn cell = make_cell_evaluator(resolved);
  ScanGrid grid =
      scan_epsilon_reflectivity(cell, epsilons, reflectivities, resolved.material.melting_point);
  std::vector<NeutralPoint> line = extract_neutral_line(grid, cell, tol_K);
  std::string csv = "epsilon,reflectivity,delta_T_K,bisections\n";
  for (const NeutralPoint& p : line) {
    csv += fmt17(p.emissivity) + "," + fmt17(p.reflectivity) + "," + fmt17(p.delta_t) + "," +
           std::to_string(p.bisections) + "\n";
  }
  write_text_file((dir / "neutral_line.csv").string(), csv);
  std::cout << "neutral line: " << line.size() << " points\n";
  return 0;
}

int cmd_melt_power(const std::string& config_path, double target_K, double power_max,
                   double tol_K) {
  RunConfig run = load_run_config(config_path);
  CaseConfig resolved = resolve_case(run);
  auto dir = ensure_output_dir(run);
  if (target_K <= 0) target_K = resolved.material.melting_point;
  ordered_json args{{"target_K", target_K},
                    {"power_max_W", power_max},
                    {"tolerance_K", tol_K}};
  write_manifest(run, resolved, "melt-power", args, dir);

  PowerFn probe = make_power_evaluator(resolved);
  MeltingPowerResult found =
      find_melting_power(probe, target_K, resolved.chamber.ambient_temperature, power_max, tol_K);
  ordered_json out;
  out["power_W"] = found.power;
  out["peak_T_K"] = found.peak_temperature;
  out["target_K"] = target_K;
  out["tolerance_K"] = tol_K;
  out["iterations"] = found.iterations;
  ordered_json brackets = ordered_json::array();
  for (const auto& b : found.brackets) brackets.push_back(ordered_json{b[0], b[1]});
  out["brackets_W"] = brackets;
  write_text_file((dir / "melt_power.json").string(), out.dump(2) + "\n");
  std::cout << "melting power " << fmt17(found.power) << " W (peak " << fmt17(found.peak_temperature)
            << " K)\n";
  return 0;
}

int cmd_fit(const std::string& config_path, const std::string& data_path,
            const std::string& eps_range, const std::string& refl_range, double tol_K) {
  RunConfig run = load_run_config(config_path);
  CaseConfig resolved = resolve_case(run);
  auto dir = ensure_output_dir(run);
  std::vector<double> epsilons =
      eps_range.empty() ? default_epsilon_grid() : parse_range(eps_range, "--epsilon");
  std::vector<double> reflectivities =
      refl_range.empty() ? default_reflectivity_grid() : parse_range(refl_range, "--reflectivity");
  ordered_json args{{"data_file", data_path},
                    {"epsilon_values", epsilons},
                    {"reflectivity_values", reflectivities},
                    {"neutral_tolerance_K", tol_K}};
  write_manifest(run, resolved, "fit", args, dir);

  ExperimentSeries data = load_experiment_series(data_path);
  CellFn cell = make_cell_evaluator(resolved);
  ScanGrid grid =
      scan_epsilon_reflectivity(cell, epsilons, reflectivities, resolved.material.melting_point);
  std::vector<NeutralPoint> line = extract_neutral_line(grid, cell, tol_K);
  RateFn rate = make_rate_evaluator(resolved);
  std::vector<RateFit> fits = fit_rate_curves(line, data, rate);

  std::string csv = "rank,epsilon,reflectivity,residual\n";
  for (size_t i = 0; i < fits.size(); ++i) {
    csv += std::to_string(i + 1) + "," + fmt17(fits[i].emissivity) + "," +
           fmt17(fits[i].reflectivity) + "," + fmt17(fits[i].residual) + "\n";
  }
  write_text_file((dir / "fit_ranking.csv").string(), csv);

  ordered_json out;
  ordered_json jdata;
  jdata["element"] = data.element;
  jdata["diameter_m"] = data.diameter;
  jdata["wavelength_m"] = data.wavelength;
  ordered_json pts = ordered_json::array();
  for (const ExperimentPoint& p : data.points) {
    pts.push_back(ordered_json{{"power_W", p.power},
                               {"rate_kg_per_s", p.rate},
                               {"sigma_kg_per_s", p.sigma}});
  }
  jdata["points"] = pts;
  out["data"] = jdata;
  out["neutral_line"] = neutral_line_json(line);
  out["ranked"] = ranked_fits_json(fits);
  if (!fits.empty()) {
    out["best"] = ordered_json{{"epsilon", fits.front().emissivity},
                               {"reflectivity", fits.front().reflectivity},
                               {"residual", finite_or_string(fits.front().residual)}};
  }
  write_text_file((dir / "fit_result.json").string(), out.dump(2) + "\n");
  if (!fits.empty()) {
    std::cout << "best fit epsilon " << fmt17(fits.front().emissivity) << " reflectivity "
              << fmt17(fits.front().reflectivity) << " residual " << fmt17(fits.front().residual)
              << "\n";
  }
  return 0;
}

int cmd_optical_depth(const std::string& element, const std::string& temps,
                      const std::string& database, double wavelength_nm, double omega_um,
                      double beam_path_mm, const std::string& out_path) {
  MaterialRegistry registry = load_material_database(database);
  if (!registry.contains(element)) {
    throw ConfigError("material \"" + element + "\" not found in " + database);
  }
  const Material& mat = registry.get(element);
  std::vector<double> T_values = parse_range(temps, "--temps");
  LaserSpec laser;
  laser.power = 0.0;
  laser.wavelength = wavelength_nm * 1e-9;
  laser.gaussian_radius = omega_um * 1e-6;
  laser.attenuation_enabled = true;
  ChamberSpec chamber;
  chamber.ambient_temperature = 300.0;
  chamber.beam_path = beam_path_mm * 1e-3;

  std::string csv;
  csv += "# element: " + element + "\n";
  csv += "# database: " + database + "\n";
  csv += "# wavelength_nm: " + fmt17(wavelength_nm) + "\n";
  csv += "# omega_um: " + fmt17(omega_um) + "\n";
  csv += "# beam_path_mm: " + fmt17(beam_path_mm) + "\n";
  if (auto line = nearest_transition(mat, laser.wavelength)) {
    csv += "# transition_nm: " + fmt17(line->wavelength * 1e9) + "\n";
    csv += "# transition_gamma_per_s: " + fmt17(line->gamma) + "\n";
  } else {
    csv += "# transition_nm: none\n";
  }
  csv += "T_K,tau\n";
  for (double T : T_values) {
    csv += fmt17(T) + "," + fmt17(optical_depth(mat, T, laser, chamber)) + "\n";
  }
  write_text_file(out_path, csv);
  std::cout << "wrote " << out_path << " (" << T_values.size() << " temperatures)\n";
  return 0;
}

int cmd_materials(const std::string& database) {
  MaterialRegistry registry = load_material_database(database);
  std::cout << "materials in " << database << ":\n";
  for (const std::string& name : registry.names()) {
    const Material& m = registry.get(name);
    std::cout << "  " << name << ": M " << fmt17(m.molar_mass * 1e3) << " g/mol, rho "
              << fmt17(m.density) << " kg/m3, cp " << fmt17(m.specific_heat) << " J/kgK, kappa "
              << fmt17(m.thermal_conductivity) << " W/mK, epsilon " << fmt17(m.emissivity)
              << ", T_melt " << fmt17(m.melting_point) << " K, dH_vap "
              << fmt17(m.enthalpy_vaporization * 1e-3) << " kJ/mol\n";
    for (const auto& [wl, r] : m.reflectivity) {
      std::cout << "      R(" << fmt17(wl * 1e9) << " nm) = " << fmt17(r) << "\n";
    }
    std::cout << "      " << m.transitions.size() << " transition(s)";
    if (!m.source.empty()) std::cout << "  [" << m.source << "]";
    std::cout << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tlesim: CW-laser heating and evaporation simulator for cylindrical sources"};
  app.require_subcommand(1);

  std::string config_path, data_path, eps_range, refl_range, values_text, parameter;
  std::string element, temps, database = "data/materials.json", out_path = "optical_depth.csv";
  double duration = 0.0, laser_off = std::numeric_limits<double>::infinity();
  double target_K = 0.0, power_max = 2000.0, melt_tol_K = 5.0, neutral_tol_K = 2.0;
  double wavelength_nm = 1030.0, omega_um = 750.0, beam_path_mm = 500.0;

  auto* mesh_cmd = app.add_subcommand("mesh", "Generate or load the mesh and report quality");
  mesh_cmd->add_option("--config", config_path, "JSON run configuration")->required();

  auto* steady_cmd = app.add_subcommand("steady", "Run to steady state; write result and field");
  steady_cmd->add_option("--config", config_path, "JSON run configuration")->required();

  auto* transient_cmd = app.add_subcommand("transient", "Time-resolved run from ambient");
  transient_cmd->add_option("--config", config_path, "JSON run configuration")->required();
  transient_cmd->add_option("--duration-s", duration, "Simulated duration (s)")->required();
  transient_cmd->add_option("--laser-off-s", laser_off, "Switch the laser off at this time (s)");

  auto* sweep_cmd = app.add_subcommand(
      "sweep", "Steady solves over one varied parameter (kappa W/mK, rho kg/m3, cp J/kgK, "
               "omega um, epsilon, R, power W)");
  sweep_cmd->add_option("--config", config_path, "JSON run configuration")->required();
  sweep_cmd->add_option("--parameter", parameter, "Parameter name")->required();
  sweep_cmd->add_option("--values", values_text, "Comma-separated values")->required();

  auto* scan_cmd = app.add_subcommand("scan", "Grid of steady solves over (epsilon, R)");
  scan_cmd->add_option("--config", config_path, "JSON run configuration")->required();
  scan_cmd->add_option("--epsilon", eps_range, "Emissivity grid lo:hi:step");
  scan_cmd->add_option("--reflectivity", refl_range, "Reflectivity grid lo:hi:step");
  scan_cmd->add_option("--data", data_path, "Experiment CSV; adds ranked fits to the summary");
  scan_cmd->add_option("--neutral-tol-K", neutral_tol_K, "Neutral-line bisection tolerance (K)");

  auto* neutral_cmd = app.add_subcommand("neutral-line",
                                         "Extract the peak-T = T_melt contour from a scan");
  neutral_cmd->add_option("--config", config_path, "JSON run configuration")->required();
  neutral_cmd->add_option("--epsilon", eps_range, "Emissivity grid lo:hi:step");
  neutral_cmd->add_option("--reflectivity", refl_range, "Reflectivity grid lo:hi:step");
  neutral_cmd->add_option("--tol-K", neutral_tol_K, "Bisection tolerance (K)");

  auto* melt_cmd = app.add_subcommand("melt-power", "Bisect laser power to the melting point");
  melt_cmd->add_option("--config", config_path, "JSON run configuration")->required();
  melt_cmd->add_option("--target-K", target_K, "Target peak temperature (default: T_melt)");
  melt_cmd->add_option("--power-max-W", power_max, "Upper bracket end (W)");
  melt_cmd->add_option("--tol-K", melt_tol_K, "Acceptance window around the target (K)");

  auto* fit_cmd = app.add_subcommand("fit", "Rank neutral-line candidates against rate data");
  fit_cmd->add_option("--config", config_path, "JSON run configuration")->required();
  fit_cmd->add_option("--data", data_path, "Experiment CSV (power_W,rate_kg_per_s)")->required();
  fit_cmd->add_option("--epsilon", eps_range, "Emissivity grid lo:hi:step");
  fit_cmd->add_option("--reflectivity", refl_range, "Reflectivity grid lo:hi:step");
  fit_cmd->add_option("--tol-K", neutral_tol_K, "Neutral-line bisection tolerance (K)");

  auto* tau_cmd = app.add_subcommand("optical-depth", "Tabulate plume optical depth vs T");
  tau_cmd->add_option("--element", element, "Material name")->required();
  tau_cmd->add_option("--temps", temps, "Temperature range lo:hi:step (K)")->required();
  tau_cmd->add_option("--database", database, "Material database path");
  tau_cmd->add_option("--wavelength-nm", wavelength_nm, "Laser wavelength (nm)");
  tau_cmd->add_option("--omega-um", omega_um, "Gaussian spot radius (um)");
  tau_cmd->add_option("--beam-path-mm", beam_path_mm, "Window-to-source path (mm)");
  tau_cmd->add_option("--out", out_path, "Output CSV path");

  auto* materials_cmd = app.add_subcommand("materials", "List the material database");
  materials_cmd->add_option("--database", database, "Material database path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);  // prints help, exit 0
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help() << std::flush;
    return 1;
  }

  try {
    if (*mesh_cmd) return cmd_mesh(config_path);
    if (*steady_cmd) return cmd_steady(config_path);
    if (*transient_cmd) return cmd_transient(config_path, duration, laser_off);
    if (*sweep_cmd) return cmd_sweep(config_path, parameter, values_text);
    if (*scan_cmd) return cmd_scan(config_path, eps_range, refl_range, data_path, neutral_tol_K);
    if (*neutral_cmd) return cmd_neutral_line(config_path, eps_range, refl_range, neutral_tol_K);
    if (*melt_cmd) return cmd_melt_power(config_path, target_K, power_max, melt_tol_K);
    if (*fit_cmd) return cmd_fit(config_path, data_path, eps_range, refl_range, neutral_tol_K);
    if (*tau_cmd) {
      return cmd_optical_depth(element, temps, database, wavelength_nm, omega_um, beam_path_mm,
                               out_path);
    }
    if (*materials_cmd) return cmd_materials(database);
  } catch (const NonConvergence& e) {
    std::cerr << "solver did not converge: " << e.what() << "\n";
    return 2;
  } catch (const NoBracket& e) {
    std::cerr << "melting-power search failed: " << e.what() << "\n";
    return 2;
  } catch (const NoSignChange& e) {
    std::cerr << "neutral-line extraction failed: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 1;
}
