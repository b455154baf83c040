#pragma once

#include <utility>
#include <vector>

#include "tlesim/field.hpp"
#include "tlesim/material.hpp"
#include "tlesim/physics.hpp"

namespace tlesim {

// Highest nodal temperature and its vertex (lowest index wins ties).
std::pair<double, int> peak_temperature(const TemperatureField& field);

// Total evaporated mass over the whole boundary, kg/s. Three-point
// quadrature of the Hertz-Knudsen flux on every boundary facet.
double total_mass_evaporation_rate(const TemperatureField& field, const Material& material);

struct MeltPool {
  double area = 0.0;           // m^2, facets fully at or above melting
  int facet_count = 0;
  bool any_molten = false;     // any node at or above melting
};

MeltPool melt_pool(const TemperatureField& field, const Material& material);

struct BoundaryPowers {
  double absorbed = 0.0;    // W deposited by the beam
  double radiated = 0.0;    // W net thermal radiation
  double evaporated = 0.0;  // W carried off by vapor
};

// Surface integrals of the boundary exchange terms, evaluated directly
// from the nodal field; independent of the assembly path.
BoundaryPowers integrate_boundary_powers(const TemperatureField& field, const Material& material,
                                         const LaserSpec& laser, const ChamberSpec& chamber,
                                         double optical_depth);

// Deposition-rate conversion: a scale of s mg per angstrom of film means
// 1 A/s of growth consumes s mg/s of source mass.
double rate_to_growth(double mass_rate_kg_s, double scale_mg_per_angstrom);
double growth_to_rate(double growth_angstrom_s, double scale_mg_per_angstrom);

inline double kg_per_s_to_mg_per_min(double rate) { return rate * 6e7; }

} // namespace tlesim
