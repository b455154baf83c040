#include "tlesim/postprocess.hpp"

#include <array>
#include <stdexcept>

namespace tlesim {

namespace {

// Degree-2 rule on the reference triangle, barycentric points. Matches the
// rule the assembly applies to the loss terms.
constexpr double kBary[3][3] = {
    {2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0},
    {1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0},
    {1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0},
};
constexpr double kWeight = 1.0 / 3.0;

// Degree-4 rule used for the sharply peaked beam profile, so the absorbed
// power agrees with the load vector the assembly deposits even on facets
// comparable in size to the spot.
constexpr double kA1 = 0.816847572980459, kB1 = 0.091576213509771;
constexpr double kA2 = 0.108103018168070, kB2 = 0.445948490915965;
constexpr double kBary6[6][3] = {
    {kA1, kB1, kB1}, {kB1, kA1, kB1}, {kB1, kB1, kA1},
    {kA2, kB2, kB2}, {kB2, kA2, kB2}, {kB2, kB2, kA2},
};
constexpr double kWeight6[6] = {0.109951743655322, 0.109951743655322, 0.109951743655322,
                                0.223381589678011, 0.223381589678011, 0.223381589678011};

void check_field(const TemperatureField& field) {
  if (!field.mesh) throw std::invalid_argument("field has no mesh");
  if (static_cast<int>(field.values.size()) != field.mesh->num_vertices())
    throw std::invalid_argument("field size does not match mesh");
}

} // namespace

std::pair<double, int> peak_temperature(const TemperatureField& field) {
  check_field(field);
  double best = field.values[0];
  int best_vertex = 0;
  for (int i = 1; i < static_cast<int>(field.values.size()); ++i) {
    if (field.values[i] > best) {
      best = field.values[i];
      best_vertex = i;
    }
  }
  return {best, best_vertex};
}

double total_mass_evaporation_rate(const TemperatureField& field, const Material& material) {
  check_field(field);
  const Mesh& mesh = *field.mesh;
  double rate = 0.0;
  for (int f = 0; f < mesh.num_facets(); ++f) {
    const BoundaryFacet& facet = mesh.facets[f];
    const double area = mesh.facet_area(f);
    std::array<double, 3> tn = {field.values[facet.v[0]], field.values[facet.v[1]],
                                field.values[facet.v[2]]};
    for (int q = 0; q < 3; ++q) {
      const double tq = kBary[q][0] * tn[0] + kBary[q][1] * tn[1] + kBary[q][2] * tn[2];
      rate += kWeight * area * evaporative_mass_flux(material, tq);
    }
  }
  return rate;
}

MeltPool melt_pool(const TemperatureField& field, const Material& material) {
  check_field(field);
  const Mesh& mesh = *field.mesh;
  MeltPool pool;
  for (int f = 0; f < mesh.num_facets(); ++f) {
    const BoundaryFacet& facet = mesh.facets[f];
    int molten_nodes = 0;
    for (int k = 0; k < 3; ++k)
      if (field.values[facet.v[k]] >= material.melting_point) ++molten_nodes;
    if (molten_nodes > 0) pool.any_molten = true;
    if (molten_nodes == 3) {
      pool.area += mesh.facet_area(f);
      ++pool.facet_count;
    }
  }
  return pool;
}

BoundaryPowers integrate_boundary_powers(const TemperatureField& field, const Material& material,
                                         const LaserSpec& laser, const ChamberSpec& chamber,
                                         double optical_depth) {
  check_field(field);
  const Mesh& mesh = *field.mesh;
  const double reflectivity = reflectivity_at(material, laser.wavelength);
  BoundaryPowers powers;
  for (int f = 0; f < mesh.num_facets(); ++f) {
    const BoundaryFacet& facet = mesh.facets[f];
    const double area = mesh.facet_area(f);
    std::array<Vec3, 3> xn = {mesh.vertices[facet.v[0]], mesh.vertices[facet.v[1]],
                              mesh.vertices[facet.v[2]]};
    std::array<double, 3> tn = {field.values[facet.v[0]], field.values[facet.v[1]],
                                field.values[facet.v[2]]};
    for (int q = 0; q < 3; ++q) {
      const double w = kWeight * area;
      const double tq = kBary[q][0] * tn[0] + kBary[q][1] * tn[1] + kBary[q][2] * tn[2];
      powers.radiated +=
          w * radiative_flux(material.emissivity, tq, chamber.ambient_temperature);
      powers.evaporated += w * evaporative_heat_flux(material, tq);
    }
    if (facet.tag == BoundaryTag::TopSurface) {
      for (int q = 0; q < 6; ++q) {
        const double xq =
            kBary6[q][0] * xn[0].x + kBary6[q][1] * xn[1].x + kBary6[q][2] * xn[2].x;
        const double yq =
            kBary6[q][0] * xn[0].y + kBary6[q][1] * xn[1].y + kBary6[q][2] * xn[2].y;
        powers.absorbed +=
            kWeight6[q] * area * laser_flux(laser, reflectivity, xq, yq, optical_depth);
      }
    }
  }
  return powers;
}

double rate_to_growth(double mass_rate_kg_s, double scale_mg_per_angstrom) {
  if (!(scale_mg_per_angstrom > 0.0))
    throw std::invalid_argument("deposition scale must be positive");
  return mass_rate_kg_s * 1e6 / scale_mg_per_angstrom;
}

double growth_to_rate(double growth_angstrom_s, double scale_mg_per_angstrom) {
  if (!(scale_mg_per_angstrom > 0.0))
    throw std::invalid_argument("deposition scale must be positive");
  return growth_angstrom_s * scale_mg_per_angstrom * 1e-6;
}

} // namespace tlesim
