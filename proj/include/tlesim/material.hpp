#pragma once

#include <map>
#include <string>
#include <vector>

namespace tlesim {

// Four-coefficient vapor-pressure correlation:
//   p(T) = 10^(a + b/T + c*log10(T) + d*1e-3*T) * reference_pa
// where reference_pa is 101325 for atmosphere-referenced coefficient sets and
// 1 for pascal-referenced ones.
struct VaporPressureFit {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double d = 0.0;
  double reference_pa = 1.0;
};

// One electronic transition used for resonant absorption of the evaporated
// plume: line center wavelength (m) and natural linewidth (1/s).
struct Transition {
  double wavelength = 0.0;
  double gamma = 0.0;
};

struct Material {
  std::string name;
  double molar_mass = 0.0;            // kg/mol
  double atomic_mass = 0.0;           // kg, molar_mass / N_A
  double density = 0.0;               // kg/m^3
  double specific_heat = 0.0;         // J/(kg K)
  double thermal_conductivity = 0.0;  // W/(m K)
  double emissivity = 0.0;
  std::map<double, double> reflectivity;  // laser wavelength (m) -> reflectivity
  double enthalpy_vaporization = 0.0; // J/mol
  double melting_point = 0.0;         // K
  VaporPressureFit vapor;
  std::vector<Transition> transitions;
  std::string source;
};

// Equilibrium vapor pressure (Pa) and its temperature derivative (Pa/K).
double vapor_pressure(const Material& mat, double temperature);
double vapor_pressure_derivative(const Material& mat, double temperature);

// Reflectivity at a laser wavelength; the table is matched within 1 nm.
// Throws std::runtime_error listing the tabulated wavelengths on a miss.
double reflectivity_at(const Material& mat, double wavelength);

class MaterialRegistry {
 public:
  void add(Material mat);  // validates; throws naming the offending field
  const Material& get(const std::string& name) const;
  bool contains(const std::string& name) const { return records_.count(name) > 0; }
  std::vector<std::string> names() const;
  size_t size() const { return records_.size(); }

 private:
  std::map<std::string, Material> records_;
};

// Loads a JSON material database. An empty (or whitespace-only) file yields
// an empty registry. Validation failures name the material and field.
MaterialRegistry load_material_database(const std::string& path);
MaterialRegistry parse_material_database(const std::string& json_text, const std::string& origin);

} // namespace tlesim
