#include "tlesim/config_io.hpp"

#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>

#include <nlohmann/json.hpp>

#include "tlesim/constants.hpp"
#include "tlesim/gmsh_io.hpp"
#include "tlesim/mesh.hpp"
#include "tlesim/physics.hpp"

#ifndef TLESIM_VERSION
#define TLESIM_VERSION "dev"
#endif

namespace tlesim {

using nlohmann::json;
using ordered = nlohmann::ordered_json;

namespace {

[[noreturn]] void fail(const std::string& origin, const std::string& what) {
  throw ConfigError(origin + ": " + what);
}

void reject_unknown_keys(const json& obj, const std::string& origin, const std::string& context,
                         std::initializer_list<const char*> allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const char* k : allowed) {
      if (it.key() == k) {
        known = true;
        break;
      }
    }
    if (!known) fail(origin, "unknown key \"" + it.key() + "\" in " + context);
  }
}

double require_number(const json& obj, const std::string& origin, const std::string& context,
                      const char* key) {
  if (!obj.contains(key)) fail(origin, context + " is missing required field \"" + key + "\"");
  if (!obj.at(key).is_number()) fail(origin, context + " field \"" + key + "\" must be a number");
  return obj.at(key).get<double>();
}

double number_or(const json& obj, const std::string& origin, const std::string& context,
                 const char* key, double fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj.at(key).is_number()) fail(origin, context + " field \"" + key + "\" must be a number");
  return obj.at(key).get<double>();
}

int int_or(const json& obj, const std::string& origin, const std::string& context,
           const char* key, int fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj.at(key).is_number_integer()) {
    fail(origin, context + " field \"" + key + "\" must be an integer");
  }
  return obj.at(key).get<int>();
}

bool bool_or(const json& obj, const std::string& origin, const std::string& context,
             const char* key, bool fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj.at(key).is_boolean()) fail(origin, context + " field \"" + key + "\" must be a boolean");
  return obj.at(key).get<bool>();
}

std::string require_string(const json& obj, const std::string& origin, const std::string& context,
                           const char* key) {
  if (!obj.contains(key)) fail(origin, context + " is missing required field \"" + key + "\"");
  if (!obj.at(key).is_string()) fail(origin, context + " field \"" + key + "\" must be a string");
  return obj.at(key).get<std::string>();
}

// Input paths inside a config are relative to the config file itself, so a
// config directory can be moved or invoked from any working directory.
std::string resolve_relative(const std::string& origin, const std::string& path) {
  std::filesystem::path p(path);
  if (p.is_absolute()) return path;
  std::filesystem::path base = std::filesystem::path(origin).parent_path();
  if (base.empty()) return path;
  return (base / p).lexically_normal().string();
}

}  // namespace

RunConfig parse_run_config(const std::string& json_text, const std::string& origin) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    fail(origin, std::string("JSON parse error: ") + e.what());
  }
  if (!root.is_object()) fail(origin, "top level must be a JSON object");
  reject_unknown_keys(root, origin, "top level",
                      {"material", "database", "mesh", "laser", "chamber", "solver", "output_dir"});

  RunConfig run;
  run.origin = origin;
  run.material = require_string(root, origin, "top level", "material");
  run.database = resolve_relative(origin, require_string(root, origin, "top level", "database"));

  if (!root.contains("mesh") || !root.at("mesh").is_object()) {
    fail(origin, "top level is missing required object \"mesh\"");
  }
  const json& mesh = root.at("mesh");
  reject_unknown_keys(mesh, origin, "mesh", {"generate", "load"});
  if (mesh.contains("generate") == mesh.contains("load")) {
    fail(origin, "mesh must contain exactly one of \"generate\" or \"load\"");
  }
  if (mesh.contains("generate")) {
    const json& gen = mesh.at("generate");
    reject_unknown_keys(gen, origin, "mesh.generate", {"diameter_mm", "length_mm", "refinement"});
    run.mesh.generated = true;
    run.mesh.diameter = 1e-3 * require_number(gen, origin, "mesh.generate", "diameter_mm");
    run.mesh.length = 1e-3 * require_number(gen, origin, "mesh.generate", "length_mm");
    run.mesh.refinement = int_or(gen, origin, "mesh.generate", "refinement", 0);
    if (!gen.contains("refinement")) {
      fail(origin, "mesh.generate is missing required field \"refinement\"");
    }
  } else {
    const json& load = mesh.at("load");
    reject_unknown_keys(load, origin, "mesh.load", {"path"});
    run.mesh.generated = false;
    run.mesh.path = resolve_relative(origin, require_string(load, origin, "mesh.load", "path"));
  }

  if (!root.contains("laser") || !root.at("laser").is_object()) {
    fail(origin, "top level is missing required object \"laser\"");
  }
  const json& laser = root.at("laser");
  reject_unknown_keys(laser, origin, "laser",
                      {"power_W", "wavelength_nm", "omega_um", "center_x_mm", "center_y_mm",
                       "attenuation"});
  run.laser.power = require_number(laser, origin, "laser", "power_W");
  run.laser.wavelength = 1e-9 * number_or(laser, origin, "laser", "wavelength_nm", 1030.0);
  run.laser.gaussian_radius = 1e-6 * number_or(laser, origin, "laser", "omega_um", 750.0);
  run.laser.center_x = 1e-3 * number_or(laser, origin, "laser", "center_x_mm", 0.0);
  run.laser.center_y = 1e-3 * number_or(laser, origin, "laser", "center_y_mm", 0.0);
  run.laser.attenuation_enabled = bool_or(laser, origin, "laser", "attenuation", true);

  const json chamber = root.contains("chamber") ? root.at("chamber") : json::object();
  if (!chamber.is_object()) fail(origin, "\"chamber\" must be an object");
  reject_unknown_keys(chamber, origin, "chamber", {"ambient_K", "beam_path_mm"});
  run.chamber.ambient_temperature = number_or(chamber, origin, "chamber", "ambient_K", 300.0);
  run.chamber.beam_path = 1e-3 * number_or(chamber, origin, "chamber", "beam_path_mm", 500.0);

  const json solver = root.contains("solver") ? root.at("solver") : json::object();
  if (!solver.is_object()) fail(origin, "\"solver\" must be an object");
  reject_unknown_keys(solver, origin, "solver",
                      {"newton_tol", "newton_max_iter", "dt_initial_s", "dt_growth", "dt_max_s",
                       "steady_rate_tol_K_per_s", "steady_balance_tol", "max_time_s"});
  SolverControls defaults;
  run.controls.newton_tol = number_or(solver, origin, "solver", "newton_tol", defaults.newton_tol);
  run.controls.newton_max_iter =
      int_or(solver, origin, "solver", "newton_max_iter", defaults.newton_max_iter);
  run.controls.dt_initial = number_or(solver, origin, "solver", "dt_initial_s", defaults.dt_initial);
  run.controls.dt_growth = number_or(solver, origin, "solver", "dt_growth", defaults.dt_growth);
  run.controls.dt_max = number_or(solver, origin, "solver", "dt_max_s", defaults.dt_max);
  run.controls.steady_rate_tol =
      number_or(solver, origin, "solver", "steady_rate_tol_K_per_s", defaults.steady_rate_tol);
  run.controls.steady_balance_tol =
      number_or(solver, origin, "solver", "steady_balance_tol", defaults.steady_balance_tol);
  run.controls.max_time = number_or(solver, origin, "solver", "max_time_s", defaults.max_time);

  if (root.contains("output_dir")) {
    if (!root.at("output_dir").is_string()) fail(origin, "field \"output_dir\" must be a string");
    run.output_dir = root.at("output_dir").get<std::string>();
  }

  validate(run.controls);
  return run;
}

RunConfig load_run_config(const std::string& path) {
  return parse_run_config(read_text_file(path), path);
}

CaseConfig resolve_case(const RunConfig& run, const MaterialRegistry& registry) {
  if (!registry.contains(run.material)) {
    fail(run.origin, "material \"" + run.material + "\" not found in " + run.database);
  }
  CaseConfig resolved;
  resolved.material = registry.get(run.material);
  if (run.mesh.generated) {
    resolved.mesh = std::make_shared<Mesh>(
        generate_cylinder_mesh(run.mesh.diameter, run.mesh.length, run.mesh.refinement));
  } else {
    resolved.mesh = std::make_shared<Mesh>(load_gmsh_mesh(run.mesh.path));
  }
  resolved.laser = run.laser;
  resolved.chamber = run.chamber;
  resolved.controls = run.controls;
  // Fails early, with the tabulated wavelengths in the message, if the
  // material has no reflectivity entry for this laser.
  reflectivity_at(resolved.material, resolved.laser.wavelength);
  return resolved;
}

CaseConfig resolve_case(const RunConfig& run) {
  return resolve_case(run, load_material_database(run.database));
}

std::string run_manifest_json(const RunConfig& run, const CaseConfig& resolved,
                              const std::string& command) {
  const Material& mat = resolved.material;
  ordered m;
  m["code_version"] = TLESIM_VERSION;
  m["command"] = command;
  m["config_file"] = run.origin;
  m["output_dir"] = run.output_dir;

  ordered jm;
  jm["name"] = mat.name;
  jm["molar_mass_kg_per_mol"] = mat.molar_mass;
  jm["atomic_mass_kg"] = mat.atomic_mass;
  jm["density_kg_per_m3"] = mat.density;
  jm["specific_heat_J_per_kg_K"] = mat.specific_heat;
  jm["thermal_conductivity_W_per_m_K"] = mat.thermal_conductivity;
  jm["emissivity"] = mat.emissivity;
  jm["reflectivity_at_laser"] = reflectivity_at(mat, resolved.laser.wavelength);
  ordered refl = ordered::array();
  for (const auto& [wl, r] : mat.reflectivity) {
    refl.push_back(ordered{{"wavelength_m", wl}, {"reflectivity", r}});
  }
  jm["reflectivity_table"] = refl;
  jm["melting_point_K"] = mat.melting_point;
  jm["enthalpy_vaporization_J_per_mol"] = mat.enthalpy_vaporization;
  jm["vapor_pressure"] = ordered{{"a", mat.vapor.a},
                                 {"b", mat.vapor.b},
                                 {"c", mat.vapor.c},
                                 {"d", mat.vapor.d},
                                 {"reference_pa", mat.vapor.reference_pa}};
  ordered lines = ordered::array();
  for (const auto& t : mat.transitions) {
    lines.push_back(ordered{{"wavelength_m", t.wavelength}, {"gamma_per_s", t.gamma}});
  }
  jm["transitions"] = lines;
  if (auto line = nearest_transition(mat, resolved.laser.wavelength)) {
    jm["active_transition"] =
        ordered{{"wavelength_m", line->wavelength}, {"gamma_per_s", line->gamma}};
  } else {
    jm["active_transition"] = nullptr;
  }
  m["material"] = jm;

  QualityReport q = mesh_quality_report(*resolved.mesh);
  ordered jmesh;
  if (run.mesh.generated) {
    jmesh["source"] = "generated";
    jmesh["diameter_m"] = run.mesh.diameter;
    jmesh["length_m"] = run.mesh.length;
    jmesh["refinement"] = run.mesh.refinement;
  } else {
    jmesh["source"] = "loaded";
    jmesh["path"] = run.mesh.path;
  }
  jmesh["node_count"] = q.node_count;
  jmesh["element_count"] = q.element_count;
  jmesh["boundary_facet_count"] = resolved.mesh->num_facets();
  jmesh["total_volume_m3"] = q.total_volume;
  jmesh["area_top_surface_m2"] = q.area_top_surface;
  jmesh["area_surface_m2"] = q.area_surface;
  m["mesh"] = jmesh;

  m["laser"] = ordered{{"power_W", resolved.laser.power},
                       {"wavelength_m", resolved.laser.wavelength},
                       {"gaussian_radius_m", resolved.laser.gaussian_radius},
                       {"center_x_m", resolved.laser.center_x},
                       {"center_y_m", resolved.laser.center_y},
                       {"attenuation_enabled", resolved.laser.attenuation_enabled}};
  m["chamber"] = ordered{{"ambient_temperature_K", resolved.chamber.ambient_temperature},
                         {"beam_path_length_m", resolved.chamber.beam_path}};
  const SolverControls& c = resolved.controls;
  m["solver"] = ordered{{"newton_tol", c.newton_tol},
                        {"newton_max_iter", c.newton_max_iter},
                        {"dt_initial_s", c.dt_initial},
                        {"dt_growth", c.dt_growth},
                        {"dt_max_s", c.dt_max},
                        {"steady_rate_tol_K_per_s", c.steady_rate_tol},
                        {"steady_balance_tol", c.steady_balance_tol},
                        {"max_time_s", c.max_time}};
  m["constants"] = ordered{{"avogadro_per_mol", constants::avogadro},
                           {"boltzmann_J_per_K", constants::boltzmann},
                           {"stefan_boltzmann_W_per_m2_K4", constants::stefan_boltzmann},
                           {"gas_constant_J_per_mol_K", constants::gas_constant},
                           {"speed_of_light_m_per_s", constants::speed_of_light}};
  return m.dump(2) + "\n";
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open " + path + " for writing");
  out << text;
  if (!out.flush()) throw ConfigError("failed writing " + path);
}

}  // namespace tlesim
