#include "tlesim/physics.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "tlesim/constants.hpp"

namespace tlesim {

namespace {
using std::numbers::pi;
namespace cn = constants;
} // namespace

void validate(const LaserSpec& laser) {
  if (laser.power < 0.0) throw std::invalid_argument("laser power must be non-negative");
  if (!(laser.wavelength > 0.0)) throw std::invalid_argument("laser wavelength must be positive");
  if (!(laser.gaussian_radius > 0.0))
    throw std::invalid_argument("laser gaussian radius must be positive");
}

void validate(const ChamberSpec& chamber, const LaserSpec& laser) {
  if (!(chamber.ambient_temperature > 0.0))
    throw std::invalid_argument("chamber ambient temperature must be positive");
  if (!(chamber.beam_path > laser.gaussian_radius))
    throw std::invalid_argument("chamber beam path must exceed the laser gaussian radius");
}

double laser_flux(const LaserSpec& laser, double reflectivity, double x, double y,
                  double optical_depth) {
  const double dx = x - laser.center_x;
  const double dy = y - laser.center_y;
  const double w2 = laser.gaussian_radius * laser.gaussian_radius;
  return (1.0 - reflectivity) * laser.power / (pi * w2) * std::exp(-(dx * dx + dy * dy) / w2) *
         std::exp(-optical_depth);
}

double radiative_flux(double emissivity, double temperature, double ambient_temperature) {
  const double t2 = temperature * temperature;
  const double a2 = ambient_temperature * ambient_temperature;
  return emissivity * cn::stefan_boltzmann * (t2 * t2 - a2 * a2);
}

double radiative_flux_derivative(double emissivity, double temperature) {
  return 4.0 * emissivity * cn::stefan_boltzmann * temperature * temperature * temperature;
}

double evaporative_mass_flux(const Material& mat, double temperature) {
  return vapor_pressure(mat, temperature) *
         std::sqrt(mat.atomic_mass / (2.0 * pi * cn::boltzmann * temperature));
}

double evaporative_heat_flux(const Material& mat, double temperature) {
  const double bracket = mat.enthalpy_vaporization / mat.molar_mass +
                         1.5 * cn::gas_constant * temperature / mat.molar_mass;
  return bracket * evaporative_mass_flux(mat, temperature);
}

double evaporative_heat_flux_derivative(const Material& mat, double temperature) {
  const double bracket = mat.enthalpy_vaporization / mat.molar_mass +
                         1.5 * cn::gas_constant * temperature / mat.molar_mass;
  const double bracket_dT = 1.5 * cn::gas_constant / mat.molar_mass;
  const double root = std::sqrt(mat.atomic_mass / (2.0 * pi * cn::boltzmann * temperature));
  const double p = vapor_pressure(mat, temperature);
  const double dp = vapor_pressure_derivative(mat, temperature);
  const double flux = p * root;
  const double flux_dT = root * (dp - 0.5 * p / temperature);
  return bracket_dT * flux + bracket * flux_dT;
}

double absorption_cross_section(const Transition& line, double laser_wavelength) {
  const double sigma0 = 3.0 * line.wavelength * line.wavelength / (2.0 * pi);
  const double detuning =
      2.0 * pi * cn::speed_of_light * (1.0 / laser_wavelength - 1.0 / line.wavelength);
  const double g2 = line.gamma * line.gamma;
  return sigma0 * g2 / (g2 + 4.0 * detuning * detuning);
}

std::optional<Transition> nearest_transition(const Material& mat, double laser_wavelength) {
  std::optional<Transition> best;
  for (const auto& line : mat.transitions)
    if (!best || std::abs(line.wavelength - laser_wavelength) <
                     std::abs(best->wavelength - laser_wavelength))
      best = line;
  return best;
}

double optical_depth(const Material& mat, double surface_temperature, const LaserSpec& laser,
                     const ChamberSpec& chamber) {
  if (!laser.attenuation_enabled) return 0.0;
  const auto line = nearest_transition(mat, laser.wavelength);
  if (!line) return 0.0;

  const double prefactor = 3.0 * line->wavelength * line->wavelength /
                           (2.0 * std::sqrt(2.0) * pi * cn::boltzmann * surface_temperature);
  const double detuning =
      2.0 * pi * cn::speed_of_light * (1.0 / laser.wavelength - 1.0 / line->wavelength);
  const double g2 = line->gamma * line->gamma;
  const double line_factor = g2 / (g2 + 4.0 * detuning * detuning);
  const double column = 1.0 / laser.gaussian_radius - 1.0 / chamber.beam_path;
  return prefactor * line_factor * vapor_pressure(mat, surface_temperature) * column;
}

} // namespace tlesim
