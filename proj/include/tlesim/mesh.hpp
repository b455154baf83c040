#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

namespace tlesim {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

inline Vec3 operator+(const Vec3& a, const Vec3& b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
inline Vec3 operator-(const Vec3& a, const Vec3& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
inline Vec3 operator*(double s, const Vec3& a) { return {s * a.x, s * a.y, s * a.z}; }
inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

// Faces of a positively oriented tetrahedron, wound outward; face i sits
// opposite vertex i.
inline constexpr int tet_face_vertices[4][3] = {{1, 2, 3}, {0, 3, 2}, {0, 1, 3}, {0, 2, 1}};

// Boundary regions: the laser-facing top disk versus everything else.
enum class BoundaryTag : int {
  TopSurface = 1,
  Surface = 2,
};

struct BoundaryFacet {
  std::array<int, 3> v;  // vertex indices, wound so the facet normal points outward
  int owner_tet;
  BoundaryTag tag;
};

// Tetrahedral mesh of a solid with a tagged, watertight boundary skin.
// Coordinates are meters. Vertex and cell indices are 0-based. Meshes are
// treated as immutable once built; solvers share them by const reference.
struct Mesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 4>> tets;
  std::vector<BoundaryFacet> facets;

  int num_vertices() const { return static_cast<int>(vertices.size()); }
  int num_tets() const { return static_cast<int>(tets.size()); }
  int num_facets() const { return static_cast<int>(facets.size()); }

  double tet_volume(int t) const;
  double facet_area(int f) const;
  Vec3 facet_normal(int f) const;    // unit, outward
  Vec3 facet_centroid(int f) const;
};

double signed_tet_volume(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d);

// Uniform cylinder mesh: the axis is z, the base disk sits at z = 0 and the
// top (laser-facing) disk at z = length. Refinement r triangulates the disk
// into 6 r^2 triangles (concentric rings, outer boundary a regular 6r-gon
// inscribed in the circle) and extrudes them through 2 r axial layers; each
// prism is cut into three tetrahedra with diagonals chosen consistently
// across neighbouring prisms. Total cell count is exactly 36 r^3.
Mesh generate_cylinder_mesh(double diameter, double length, int refinement);

// Rebuilds the boundary skin of a tet mesh from scratch: faces used by
// exactly one tetrahedron, wound outward, tagged TopSurface on the plane of
// maximal z (within plane_tol) and Surface elsewhere.
std::vector<BoundaryFacet> extract_boundary(const std::vector<Vec3>& vertices,
                                            const std::vector<std::array<int, 4>>& tets,
                                            double plane_tol = 1e-9);

// Structural checks: positive cell volumes, boundary facets owned by a real
// tet and wound outward, every boundary edge shared by exactly two boundary
// facets (closed skin), tags consistent with the top plane. Throws
// std::runtime_error describing the first violation.
void validate_mesh(const Mesh& mesh, double plane_tol = 1e-9);

struct QualityReport {
  int node_count = 0;
  int element_count = 0;
  double total_volume = 0.0;
  double min_tet_volume = 0.0;
  double max_tet_volume = 0.0;
  double min_dihedral_deg = 0.0;
  double area_top_surface = 0.0;
  double area_surface = 0.0;
};

QualityReport mesh_quality_report(const Mesh& mesh);

} // namespace tlesim
