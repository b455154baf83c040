#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>

#include "tlesim/mesh.hpp"
#include "tlesim/postprocess.hpp"
#include "tlesim/vtk_io.hpp"

using namespace tlesim;

namespace {

const Material& tantalum() {
  static MaterialRegistry registry = load_material_database(std::string(TLESIM_DATA_DIR) +
                                                            "/materials.json");
  return registry.get("Ta");
}

TemperatureField uniform(std::shared_ptr<const Mesh> mesh, double T) {
  TemperatureField field;
  field.values.assign(static_cast<size_t>(mesh->num_vertices()), T);
  field.mesh = std::move(mesh);
  return field;
}

} // namespace

TEST_CASE("peak temperature reports the hottest vertex, first on ties") {
  auto mesh = std::make_shared<Mesh>(generate_cylinder_mesh(3e-3, 8e-3, 1));
  TemperatureField field = uniform(mesh, 300.0);
  field.values[5] = 1200.0;
  field.values[9] = 1200.0;
  const auto [value, vertex] = peak_temperature(field);
  CHECK(value == doctest::Approx(1200.0));
  CHECK(vertex == 5);
}

TEST_CASE("mass evaporation rate of a uniform field is flux times area") {
  auto mesh = std::make_shared<Mesh>(generate_cylinder_mesh(3e-3, 8e-3, 2));
  const Material& ta = tantalum();
  const TemperatureField field = uniform(mesh, 3293.0);
  const QualityReport q = mesh_quality_report(*mesh);
  const double expected =
      evaporative_mass_flux(ta, 3293.0) * (q.area_top_surface + q.area_surface);
  CHECK(total_mass_evaporation_rate(field, ta) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("melt pool covers exactly the facets fully above melting") {
  auto mesh = std::make_shared<Mesh>(generate_cylinder_mesh(3e-3, 8e-3, 2));
  const Material& ta = tantalum();

  TemperatureField cold = uniform(mesh, 300.0);
  const MeltPool none = melt_pool(cold, ta);
  CHECK(none.area == 0.0);
  CHECK(none.facet_count == 0);
  CHECK_FALSE(none.any_molten);

  // Melt every top-surface node.
  TemperatureField hot = uniform(mesh, 300.0);
  for (const BoundaryFacet& f : mesh->facets)
    if (f.tag == BoundaryTag::TopSurface)
      for (int k = 0; k < 3; ++k) hot.values[static_cast<size_t>(f.v[k])] = ta.melting_point;
  const MeltPool full = melt_pool(hot, ta);
  const QualityReport q = mesh_quality_report(*mesh);
  CHECK(full.any_molten);
  CHECK(full.area == doctest::Approx(q.area_top_surface).epsilon(1e-9));
  CHECK(full.facet_count == 24);

  // One molten node marks the pool as started but bounds no facet.
  TemperatureField touch = uniform(mesh, 300.0);
  touch.values[touch.values.size() - 1] = ta.melting_point + 1.0;
  const MeltPool spot = melt_pool(touch, ta);
  CHECK(spot.any_molten);
  CHECK(spot.facet_count == 0);
}

TEST_CASE("boundary power integrals on a uniform field") {
  auto mesh = std::make_shared<Mesh>(generate_cylinder_mesh(3e-3, 8e-3, 2));
  const Material& ta = tantalum();
  LaserSpec laser;
  laser.power = 280.0;
  laser.gaussian_radius = 750e-6;
  ChamberSpec chamber;
  const TemperatureField field = uniform(mesh, 2000.0);
  const BoundaryPowers powers = integrate_boundary_powers(field, ta, laser, chamber, 0.0);
  const QualityReport q = mesh_quality_report(*mesh);
  const double area = q.area_top_surface + q.area_surface;
  CHECK(powers.radiated ==
        doctest::Approx(area * radiative_flux(ta.emissivity, 2000.0, 300.0)).epsilon(1e-12));
  CHECK(powers.evaporated ==
        doctest::Approx(area * evaporative_heat_flux(ta, 2000.0)).epsilon(1e-12));
  // Beam power landing on the meshed top disk: (1-R) P (1 - exp(-r^2/w^2)).
  CHECK(powers.absorbed == doctest::Approx(68.7179052777886).epsilon(0.02));
}

TEST_CASE("deposition rate conversions") {
  CHECK(rate_to_growth(2.75e-11, 0.033) == doctest::Approx(8.333333333333333e-4).epsilon(1e-12));
  CHECK(growth_to_rate(8.333333333333333e-4, 0.033) == doctest::Approx(2.75e-11).epsilon(1e-12));
  const double rate = 4.2e-10;
  CHECK(growth_to_rate(rate_to_growth(rate, 0.05), 0.05) == doctest::Approx(rate).epsilon(1e-14));
  CHECK(kg_per_s_to_mg_per_min(1.0) == doctest::Approx(6e7));
  CHECK(kg_per_s_to_mg_per_min(2.75e-11) == doctest::Approx(1.65e-3).epsilon(1e-12));
  CHECK_THROWS(rate_to_growth(1e-10, 0.0));
}

TEST_CASE("VTK export writes a parseable legacy unstructured grid") {
  auto mesh = std::make_shared<Mesh>(generate_cylinder_mesh(3e-3, 8e-3, 1));
  TemperatureField field = uniform(mesh, 321.5);
  field.values[0] = 400.25;
  const std::string path =
      (std::filesystem::temp_directory_path() / "tlesim_export.vtk").string();
  export_vtk(field, path, "test field");

  std::ifstream in(path);
  REQUIRE(in.good());
  std::string line;
  std::getline(in, line);
  CHECK(line == "# vtk DataFile Version 3.0");
  std::getline(in, line);
  CHECK(line == "test field");
  std::getline(in, line);
  CHECK(line == "ASCII");
  std::getline(in, line);
  CHECK(line == "DATASET UNSTRUCTURED_GRID");
  std::getline(in, line);
  std::istringstream points(line);
  std::string word;
  int count = 0;
  points >> word >> count;
  CHECK(word == "POINTS");
  CHECK(count == mesh->num_vertices());

  std::stringstream rest;
  rest << in.rdbuf();
  const std::string body = rest.str();
  CHECK(body.find("CELLS 36 180") != std::string::npos);
  CHECK(body.find("CELL_TYPES 36") != std::string::npos);
  CHECK(body.find("SCALARS temperature double 1") != std::string::npos);
  CHECK(body.find("400.25") != std::string::npos);
  std::remove(path.c_str());
}
