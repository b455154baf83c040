#include "tlesim/material.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "tlesim/constants.hpp"

namespace tlesim {

double vapor_pressure(const Material& mat, double temperature) {
  if (!(temperature > 0.0))
    throw std::invalid_argument("vapor_pressure requires a positive temperature");
  const auto& v = mat.vapor;
  const double expo =
      v.a + v.b / temperature + v.c * std::log10(temperature) + v.d * 1e-3 * temperature;
  return std::pow(10.0, expo) * v.reference_pa;
}

double vapor_pressure_derivative(const Material& mat, double temperature) {
  if (!(temperature > 0.0))
    throw std::invalid_argument("vapor_pressure_derivative requires a positive temperature");
  const auto& v = mat.vapor;
  const double ln10 = std::numbers::ln10;
  const double slope =
      -v.b / (temperature * temperature) + v.c / (temperature * ln10) + v.d * 1e-3;
  return vapor_pressure(mat, temperature) * ln10 * slope;
}

double reflectivity_at(const Material& mat, double wavelength) {
  for (const auto& [wl, value] : mat.reflectivity)
    if (std::abs(wl - wavelength) <= 1e-9) return value;
  std::ostringstream msg;
  msg << "material '" << mat.name << "' has no reflectivity at " << wavelength * 1e9
      << " nm; tabulated:";
  for (const auto& [wl, value] : mat.reflectivity) msg << " " << wl * 1e9 << " nm";
  throw std::runtime_error(msg.str());
}

namespace {

void check(bool ok, const std::string& name, const std::string& detail) {
  if (!ok) throw std::runtime_error("material '" + name + "': " + detail);
}

void validate(const Material& m) {
  check(!m.name.empty(), "?", "empty name");
  check(m.molar_mass > 0.0, m.name, "molar_mass must be positive");
  check(m.density > 0.0, m.name, "density must be positive");
  check(m.specific_heat > 0.0, m.name, "specific_heat must be positive");
  check(m.thermal_conductivity > 0.0, m.name, "thermal_conductivity must be positive");
  check(m.emissivity > 0.0 && m.emissivity <= 1.0, m.name,
        "emissivity must lie in (0, 1]");
  for (const auto& [wl, value] : m.reflectivity) {
    check(wl > 0.0, m.name, "reflectivity wavelength must be positive");
    check(value >= 0.0 && value < 1.0, m.name, "reflectivity must lie in [0, 1)");
  }
  check(m.enthalpy_vaporization > 0.0, m.name, "enthalpy_vaporization must be positive");
  check(m.melting_point > 0.0, m.name, "melting_point must be positive");
  check(m.vapor.reference_pa == 1.0 || m.vapor.reference_pa == 101325.0, m.name,
        "vapor pressure_reference must be 'Pa' or 'atm'");
  for (const auto& t : m.transitions) {
    check(t.wavelength > 0.0, m.name, "transition wavelength must be positive");
    check(t.gamma > 0.0, m.name, "transition gamma must be positive");
  }
  const double rel =
      std::abs(m.atomic_mass - m.molar_mass / constants::avogadro) /
      (m.molar_mass / constants::avogadro);
  check(rel <= 1e-12, m.name, "atomic_mass inconsistent with molar_mass / N_A");
  // Correlation sanity across the operating range.
  for (int i = 0; i <= 64; ++i) {
    const double T = 300.0 + (2.0 * m.melting_point - 300.0) * i / 64.0;
    check(vapor_pressure(m, T) > 0.0, m.name, "vapor_pressure not positive over (300 K, 2 Tmelt)");
  }
}

} // namespace

void MaterialRegistry::add(Material mat) {
  if (mat.atomic_mass == 0.0) mat.atomic_mass = mat.molar_mass / constants::avogadro;
  validate(mat);
  if (records_.count(mat.name))
    throw std::runtime_error("material '" + mat.name + "' defined twice");
  records_.emplace(mat.name, std::move(mat));
}

const Material& MaterialRegistry::get(const std::string& name) const {
  auto it = records_.find(name);
  if (it == records_.end()) {
    std::ostringstream msg;
    msg << "unknown material '" << name << "'; known:";
    for (const auto& [key, rec] : records_) msg << " " << key;
    throw std::runtime_error(msg.str());
  }
  return it->second;
}

std::vector<std::string> MaterialRegistry::names() const {
  std::vector<std::string> out;
  out.reserve(records_.size());
  for (const auto& [key, rec] : records_) out.push_back(key);
  return out;
}

MaterialRegistry parse_material_database(const std::string& json_text, const std::string& origin) {
  MaterialRegistry registry;
  if (json_text.find_first_not_of(" \t\r\n") == std::string::npos) return registry;

  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error("material database '" + origin + "': " + e.what());
  }

  auto require = [&](const nlohmann::json& j, const char* key, const std::string& who) {
    if (!j.contains(key))
      throw std::runtime_error("material database '" + origin + "': " + who +
                               " missing field '" + key + "'");
    return j.at(key);
  };

  const auto& list = require(doc, "materials", "document");
  for (const auto& j : list) {
    Material m;
    m.name = require(j, "name", "record").get<std::string>();
    const std::string who = "material '" + m.name + "'";
    m.molar_mass = require(j, "molar_mass_kg_mol", who).get<double>();
    m.density = require(j, "density_kg_m3", who).get<double>();
    m.specific_heat = require(j, "specific_heat_J_kgK", who).get<double>();
    m.thermal_conductivity = require(j, "thermal_conductivity_W_mK", who).get<double>();
    m.emissivity = require(j, "emissivity", who).get<double>();
    for (const auto& r : require(j, "reflectivity", who)) {
      const double wl = require(r, "wavelength_nm", who).get<double>() * 1e-9;
      m.reflectivity[wl] = require(r, "value", who).get<double>();
    }
    m.enthalpy_vaporization = require(j, "enthalpy_vaporization_J_mol", who).get<double>();
    m.melting_point = require(j, "melting_point_K", who).get<double>();

    const auto& vp = require(j, "vapor_pressure", who);
    m.vapor.a = require(vp, "a", who).get<double>();
    m.vapor.b = require(vp, "b", who).get<double>();
    m.vapor.c = require(vp, "c", who).get<double>();
    m.vapor.d = require(vp, "d", who).get<double>();
    const std::string ref = require(vp, "pressure_reference", who).get<std::string>();
    if (ref == "Pa")
      m.vapor.reference_pa = 1.0;
    else if (ref == "atm")
      m.vapor.reference_pa = 101325.0;
    else
      throw std::runtime_error("material database '" + origin + "': " + who +
                               " pressure_reference must be 'Pa' or 'atm', got '" + ref + "'");

    if (j.contains("transitions"))
      for (const auto& t : j.at("transitions"))
        m.transitions.push_back({require(t, "wavelength_nm", who).get<double>() * 1e-9,
                                 require(t, "gamma_per_s", who).get<double>()});
    if (j.contains("source")) m.source = j.at("source").get<std::string>();

    registry.add(std::move(m));
  }
  return registry;
}

MaterialRegistry load_material_database(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open material database '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_material_database(buf.str(), path);
}

} // namespace tlesim
