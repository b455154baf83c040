#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "tlesim/gmsh_io.hpp"
#include "tlesim/mesh.hpp"

using namespace tlesim;

namespace {

// Exact solid volume of the mesh: the disk triangulation fills a regular
// 6r-gon inscribed in the circle, so the meshed volume is the prism over
// that polygon, not the full cylinder.
double ngon_prism_volume(double radius, double length, int refinement) {
  const int n = 6 * refinement;
  const double area = 0.5 * n * radius * radius * std::sin(2.0 * M_PI / n);
  return area * length;
}

} // namespace

TEST_CASE("cylinder mesh has the predicted entity counts") {
  for (int r : {1, 2, 3}) {
    const Mesh mesh = generate_cylinder_mesh(3e-3, 8e-3, r);
    const int disk = 1 + 3 * r * (r + 1);
    CHECK(mesh.num_vertices() == disk * (2 * r + 1));
    CHECK(mesh.num_tets() == 36 * r * r * r);
    CHECK(mesh.num_facets() == 36 * r * r);
    int top = 0;
    for (const BoundaryFacet& f : mesh.facets)
      if (f.tag == BoundaryTag::TopSurface) ++top;
    CHECK(top == 6 * r * r);
  }
}

TEST_CASE("cylinder mesh volume equals the inscribed polygon prism") {
  for (int r : {1, 2, 4}) {
    const Mesh mesh = generate_cylinder_mesh(3e-3, 8e-3, r);
    const QualityReport q = mesh_quality_report(mesh);
    CHECK(q.total_volume == doctest::Approx(ngon_prism_volume(1.5e-3, 8e-3, r)).epsilon(1e-12));
    CHECK(q.min_tet_volume > 0.0);
  }
  // Frozen values for the default source geometry, 3 mm x 8 mm.
  const QualityReport q1 = mesh_quality_report(generate_cylinder_mesh(3e-3, 8e-3, 1));
  CHECK(q1.total_volume == doctest::Approx(4.676537180435969e-8).epsilon(1e-12));
  CHECK(q1.area_top_surface == doctest::Approx(5.845671475544961e-6).epsilon(1e-12));
  // Lateral wall (7.2e-5) plus base disk.
  CHECK(q1.area_surface == doctest::Approx(7.2e-5 + 5.845671475544961e-6).epsilon(1e-12));
}

TEST_CASE("refinement converges to the true cylinder volume") {
  const double exact = M_PI * 1.5e-3 * 1.5e-3 * 8e-3;
  const double v6 = mesh_quality_report(generate_cylinder_mesh(3e-3, 8e-3, 6)).total_volume;
  const double v14 = mesh_quality_report(generate_cylinder_mesh(3e-3, 8e-3, 14)).total_volume;
  CHECK(std::abs(v6 - exact) / exact < 0.006);
  CHECK(std::abs(v14 - exact) / exact < 0.001);
  CHECK(std::abs(v14 - exact) < std::abs(v6 - exact));
}

TEST_CASE("generated meshes validate and have sane dihedral angles") {
  for (int r : {1, 2, 3}) {
    const Mesh mesh = generate_cylinder_mesh(3e-3, 8e-3, r);
    CHECK_NOTHROW(validate_mesh(mesh));
    const QualityReport q = mesh_quality_report(mesh);
    CHECK(q.min_dihedral_deg > 10.0);
    CHECK(q.min_dihedral_deg < 90.0);
  }
}

TEST_CASE("mesh generation is deterministic") {
  const Mesh a = generate_cylinder_mesh(3e-3, 8e-3, 2);
  const Mesh b = generate_cylinder_mesh(3e-3, 8e-3, 2);
  REQUIRE(a.num_vertices() == b.num_vertices());
  REQUIRE(a.num_tets() == b.num_tets());
  for (int i = 0; i < a.num_vertices(); ++i) {
    CHECK(a.vertices[i].x == b.vertices[i].x);
    CHECK(a.vertices[i].y == b.vertices[i].y);
    CHECK(a.vertices[i].z == b.vertices[i].z);
  }
  for (int t = 0; t < a.num_tets(); ++t) CHECK(a.tets[t] == b.tets[t]);
}

TEST_CASE("signed tet volume of the unit corner tet") {
  CHECK(signed_tet_volume({0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}) ==
        doctest::Approx(1.0 / 6.0).epsilon(1e-15));
  CHECK(signed_tet_volume({0, 0, 0}, {0, 1, 0}, {1, 0, 0}, {0, 0, 1}) ==
        doctest::Approx(-1.0 / 6.0).epsilon(1e-15));
}

TEST_CASE("quality report on a regular tetrahedron") {
  Mesh mesh;
  mesh.vertices = {{0, 0, 0},
                   {1, 0, 0},
                   {0.5, std::sqrt(3.0) / 2.0, 0},
                   {0.5, std::sqrt(3.0) / 6.0, std::sqrt(2.0 / 3.0)}};
  mesh.tets = {{0, 1, 2, 3}};
  mesh.facets = extract_boundary(mesh.vertices, mesh.tets);
  REQUIRE(mesh.num_facets() == 4);
  const QualityReport q = mesh_quality_report(mesh);
  CHECK(q.total_volume == doctest::Approx(0.1178511301977579).epsilon(1e-12));
  CHECK(q.min_dihedral_deg == doctest::Approx(70.52877936550931).epsilon(1e-9));
}

TEST_CASE("boundary facets point outward and top facets lie on the lid") {
  const Mesh mesh = generate_cylinder_mesh(3e-3, 8e-3, 2);
  for (int f = 0; f < mesh.num_facets(); ++f) {
    const Vec3 n = mesh.facet_normal(f);
    const Vec3 c = mesh.facet_centroid(f);
    if (mesh.facets[f].tag == BoundaryTag::TopSurface) {
      CHECK(n.z == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(c.z == doctest::Approx(8e-3).epsilon(1e-12));
    } else {
      // Base disk or lateral wall: never pointing up.
      CHECK(n.z < 0.5);
    }
    CHECK(norm(n) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("extract_boundary rejects a face shared by three cells") {
  std::vector<Vec3> vertices = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0},
                                {0, 0, 1}, {0, 0, -1}, {1, 1, -2}};
  std::vector<std::array<int, 4>> tets = {{0, 1, 2, 3}, {0, 2, 1, 4}, {0, 1, 2, 5}};
  CHECK_THROWS(extract_boundary(vertices, tets));
}

TEST_CASE("validate_mesh catches inverted cells and broken skins") {
  Mesh mesh = generate_cylinder_mesh(3e-3, 8e-3, 1);
  std::swap(mesh.tets[0][2], mesh.tets[0][3]);  // invert one cell
  CHECK_THROWS(validate_mesh(mesh));

  Mesh holed = generate_cylinder_mesh(3e-3, 8e-3, 1);
  holed.facets.pop_back();  // puncture the skin
  CHECK_THROWS(validate_mesh(holed));

  Mesh retagged = generate_cylinder_mesh(3e-3, 8e-3, 1);
  for (BoundaryFacet& f : retagged.facets)
    if (f.tag == BoundaryTag::Surface) {
      f.tag = BoundaryTag::TopSurface;  // claim a wall facet is on the lid
      break;
    }
  CHECK_THROWS(validate_mesh(retagged));
}

TEST_CASE("mesh file round trip preserves geometry and tags") {
  const Mesh mesh = generate_cylinder_mesh(3e-3, 8e-3, 2);
  const std::string path =
      (std::filesystem::temp_directory_path() / "tlesim_roundtrip.msh").string();
  write_gmsh_mesh(mesh, path);
  const Mesh loaded = load_gmsh_mesh(path);
  std::remove(path.c_str());

  REQUIRE(loaded.num_vertices() == mesh.num_vertices());
  REQUIRE(loaded.num_tets() == mesh.num_tets());
  REQUIRE(loaded.num_facets() == mesh.num_facets());
  for (int i = 0; i < mesh.num_vertices(); ++i) {
    CHECK(loaded.vertices[i].x == mesh.vertices[i].x);
    CHECK(loaded.vertices[i].y == mesh.vertices[i].y);
    CHECK(loaded.vertices[i].z == mesh.vertices[i].z);
  }
  int top_before = 0, top_after = 0;
  for (const BoundaryFacet& f : mesh.facets)
    if (f.tag == BoundaryTag::TopSurface) ++top_before;
  for (const BoundaryFacet& f : loaded.facets)
    if (f.tag == BoundaryTag::TopSurface) ++top_after;
  CHECK(top_before == top_after);
  CHECK_NOTHROW(validate_mesh(loaded));
}

TEST_CASE("cylinder generator rejects bad arguments") {
  CHECK_THROWS(generate_cylinder_mesh(0.0, 8e-3, 2));
  CHECK_THROWS(generate_cylinder_mesh(3e-3, -1.0, 2));
  CHECK_THROWS(generate_cylinder_mesh(3e-3, 8e-3, 0));
}
