#include "tlesim/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>
#include <string>

namespace tlesim {

double signed_tet_volume(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d) {
  return dot(cross(b - a, c - a), d - a) / 6.0;
}

double Mesh::tet_volume(int t) const {
  const auto& e = tets[t];
  return signed_tet_volume(vertices[e[0]], vertices[e[1]], vertices[e[2]], vertices[e[3]]);
}

double Mesh::facet_area(int f) const {
  const auto& fc = facets[f].v;
  return 0.5 * norm(cross(vertices[fc[1]] - vertices[fc[0]], vertices[fc[2]] - vertices[fc[0]]));
}

Vec3 Mesh::facet_normal(int f) const {
  const auto& fc = facets[f].v;
  Vec3 n = cross(vertices[fc[1]] - vertices[fc[0]], vertices[fc[2]] - vertices[fc[0]]);
  double len = norm(n);
  return {n.x / len, n.y / len, n.z / len};
}

Vec3 Mesh::facet_centroid(int f) const {
  const auto& fc = facets[f].v;
  return (1.0 / 3.0) * (vertices[fc[0]] + vertices[fc[1]] + vertices[fc[2]]);
}

namespace {

std::array<int, 3> sorted_face(int a, int b, int c) {
  std::array<int, 3> f{a, b, c};
  std::sort(f.begin(), f.end());
  return f;
}

void append_tet(std::vector<std::array<int, 4>>& tets, const std::vector<Vec3>& verts,
                int a, int b, int c, int d) {
  if (signed_tet_volume(verts[a], verts[b], verts[c], verts[d]) < 0.0) std::swap(c, d);
  tets.push_back({a, b, c, d});
}

// Cuts one triangular prism into three tets by coning from its smallest
// global vertex index. Every quad face is thereby split along the diagonal
// through the quad's own smallest index, so adjacent prisms agree on shared
// faces without any communication.
void split_prism(std::vector<std::array<int, 4>>& tets, const std::vector<Vec3>& verts,
                 const std::array<int, 3>& bot, const std::array<int, 3>& top) {
  const int prism[6] = {bot[0], bot[1], bot[2], top[0], top[1], top[2]};
  int vmin = prism[0];
  for (int v : prism) vmin = std::min(vmin, v);

  const std::array<int, 3> tris[2] = {{bot[0], bot[2], bot[1]}, {top[0], top[1], top[2]}};
  const std::array<int, 4> quads[3] = {{bot[0], bot[1], top[1], top[0]},
                                       {bot[1], bot[2], top[2], top[1]},
                                       {bot[2], bot[0], top[0], top[2]}};

  auto contains = [&](const int* f, int n, int v) {
    for (int i = 0; i < n; ++i)
      if (f[i] == v) return true;
    return false;
  };

  for (const auto& t : tris) {
    if (contains(t.data(), 3, vmin)) continue;
    append_tet(tets, verts, t[0], t[1], t[2], vmin);
  }
  for (const auto& q : quads) {
    if (contains(q.data(), 4, vmin)) continue;
    if (std::min(q[0], q[2]) < std::min(q[1], q[3])) {
      append_tet(tets, verts, q[0], q[1], q[2], vmin);
      append_tet(tets, verts, q[0], q[2], q[3], vmin);
    } else {
      append_tet(tets, verts, q[1], q[2], q[3], vmin);
      append_tet(tets, verts, q[1], q[3], q[0], vmin);
    }
  }
}

} // namespace

std::vector<BoundaryFacet> extract_boundary(const std::vector<Vec3>& vertices,
                                            const std::vector<std::array<int, 4>>& tets,
                                            double plane_tol) {
  struct FaceUse {
    int count = 0;
    int tet = -1;
    std::array<int, 3> winding{};
  };
  std::map<std::array<int, 3>, FaceUse> faces;
  for (int t = 0; t < static_cast<int>(tets.size()); ++t) {
    for (const auto& lf : tet_face_vertices) {
      std::array<int, 3> w{tets[t][lf[0]], tets[t][lf[1]], tets[t][lf[2]]};
      auto& use = faces[sorted_face(w[0], w[1], w[2])];
      use.count += 1;
      if (use.count > 2) throw std::runtime_error("mesh face shared by more than two tetrahedra");
      use.tet = t;
      use.winding = w;
    }
  }

  double z_top = vertices.empty() ? 0.0 : vertices[0].z;
  for (const auto& v : vertices) z_top = std::max(z_top, v.z);

  std::vector<BoundaryFacet> boundary;
  for (const auto& [key, use] : faces) {
    if (use.count != 1) continue;
    bool on_top = true;
    for (int v : use.winding) on_top = on_top && std::abs(vertices[v].z - z_top) <= plane_tol;
    boundary.push_back({use.winding, use.tet, on_top ? BoundaryTag::TopSurface : BoundaryTag::Surface});
  }
  return boundary;
}

Mesh generate_cylinder_mesh(double diameter, double length, int refinement) {
  if (!(diameter > 0.0) || !(length > 0.0))
    throw std::invalid_argument("cylinder mesh requires positive diameter and length");
  if (refinement < 1)
    throw std::invalid_argument("cylinder mesh refinement must be at least 1 (mesh degenerates)");

  const int r = refinement;
  const double radius = 0.5 * diameter;
  const int nz = 2 * r;
  const double dz = length / nz;

  // Disk vertex layout: center, then ring k (1..r) holding 6k vertices.
  auto ring_start = [](int k) { return k == 0 ? 0 : 1 + 3 * k * (k - 1); };
  auto ring_size = [](int k) { return k == 0 ? 1 : 6 * k; };
  const int disk_verts = 1 + 3 * r * (r + 1);

  std::vector<double> disk_x(disk_verts), disk_y(disk_verts);
  disk_x[0] = 0.0;
  disk_y[0] = 0.0;
  for (int k = 1; k <= r; ++k) {
    const double rk = radius * k / r;
    for (int i = 0; i < 6 * k; ++i) {
      const double theta = 2.0 * std::numbers::pi * i / (6.0 * k);
      disk_x[ring_start(k) + i] = rk * std::cos(theta);
      disk_y[ring_start(k) + i] = rk * std::sin(theta);
    }
  }

  // Triangulate each annular band with a two-pointer walk over the inner and
  // outer rings; rings are angularly aligned at multiples of 60 degrees.
  std::vector<std::array<int, 3>> disk_tris;
  disk_tris.reserve(6 * r * r);
  for (int j = 0; j < 6; ++j)
    disk_tris.push_back({0, ring_start(1) + j, ring_start(1) + (j + 1) % 6});
  for (int k = 1; k < r; ++k) {
    const int m1 = ring_size(k), m2 = ring_size(k + 1);
    const int s1 = ring_start(k), s2 = ring_start(k + 1);
    int i = 0, j = 0;
    while (i < m1 || j < m2) {
      const bool advance_outer = j < m2 && (i == m1 || (i + 1) * m2 > (j + 1) * m1);
      if (advance_outer) {
        disk_tris.push_back({s1 + i % m1, s2 + j % m2, s2 + (j + 1) % m2});
        ++j;
      } else {
        disk_tris.push_back({s1 + i % m1, s2 + j % m2, s1 + (i + 1) % m1});
        ++i;
      }
    }
  }
  // Enforce counterclockwise winding seen from +z.
  for (auto& t : disk_tris) {
    const double ax = disk_x[t[0]], ay = disk_y[t[0]];
    const double sgn = (disk_x[t[1]] - ax) * (disk_y[t[2]] - ay) -
                       (disk_y[t[1]] - ay) * (disk_x[t[2]] - ax);
    if (sgn < 0.0) std::swap(t[1], t[2]);
  }

  Mesh mesh;
  mesh.vertices.reserve(static_cast<size_t>(disk_verts) * (nz + 1));
  for (int l = 0; l <= nz; ++l) {
    const double z = (l == nz) ? length : l * dz;
    for (int i = 0; i < disk_verts; ++i) mesh.vertices.push_back({disk_x[i], disk_y[i], z});
  }

  mesh.tets.reserve(static_cast<size_t>(disk_tris.size()) * nz * 3);
  for (int l = 0; l < nz; ++l) {
    const int lo = l * disk_verts, hi = (l + 1) * disk_verts;
    for (const auto& t : disk_tris) {
      split_prism(mesh.tets, mesh.vertices,
                  {lo + t[0], lo + t[1], lo + t[2]},
                  {hi + t[0], hi + t[1], hi + t[2]});
    }
  }

  mesh.facets = extract_boundary(mesh.vertices, mesh.tets);
  return mesh;
}

void validate_mesh(const Mesh& mesh, double plane_tol) {
  if (mesh.num_vertices() < 4) throw std::runtime_error("mesh has fewer than 4 vertices");
  if (mesh.tets.empty()) throw std::runtime_error("mesh has no tetrahedra");

  const int nv = mesh.num_vertices();
  for (const auto& t : mesh.tets)
    for (int v : t)
      if (v < 0 || v >= nv) throw std::runtime_error("tetrahedron vertex index out of range");

  for (int t = 0; t < mesh.num_tets(); ++t)
    if (!(mesh.tet_volume(t) > 0.0))
      throw std::runtime_error("tetrahedron " + std::to_string(t) + " has non-positive volume");

  std::map<std::array<int, 3>, int> skin;
  for (const auto& t : mesh.tets)
    for (const auto& lf : tet_face_vertices)
      skin[sorted_face(t[lf[0]], t[lf[1]], t[lf[2]])] += 1;

  std::map<std::array<int, 3>, int> listed;
  for (const auto& f : mesh.facets) {
    auto key = sorted_face(f.v[0], f.v[1], f.v[2]);
    auto it = skin.find(key);
    if (it == skin.end() || it->second != 1)
      throw std::runtime_error("boundary facet is not a boundary face of the tet mesh");
    if (++listed[key] > 1) throw std::runtime_error("boundary facet listed twice");

    const auto& tet = mesh.tets[f.owner_tet];
    int opposite = -1;
    for (int v : tet) {
      if (v != f.v[0] && v != f.v[1] && v != f.v[2]) {
        if (opposite >= 0) {
          opposite = -2;
          break;
        }
        opposite = v;
      }
    }
    if (opposite < 0) throw std::runtime_error("boundary facet owner tet does not contain the facet");
    if (signed_tet_volume(mesh.vertices[f.v[0]], mesh.vertices[f.v[1]], mesh.vertices[f.v[2]],
                          mesh.vertices[opposite]) >= 0.0)
      throw std::runtime_error("boundary facet normal does not point outward");
  }
  size_t boundary_count = 0;
  for (const auto& [key, count] : skin)
    if (count == 1) ++boundary_count;
  if (boundary_count != mesh.facets.size())
    throw std::runtime_error("boundary skin incomplete: mesh boundary not fully covered by facets");

  std::map<std::array<int, 2>, int> edge_use;
  for (const auto& f : mesh.facets)
    for (int e = 0; e < 3; ++e) {
      int a = f.v[e], b = f.v[(e + 1) % 3];
      if (a > b) std::swap(a, b);
      edge_use[{a, b}] += 1;
    }
  for (const auto& [edge, uses] : edge_use)
    if (uses != 2) throw std::runtime_error("boundary skin not watertight: edge not shared by exactly two facets");

  double z_top = mesh.vertices[0].z;
  for (const auto& v : mesh.vertices) z_top = std::max(z_top, v.z);
  for (const auto& f : mesh.facets) {
    if (f.tag != BoundaryTag::TopSurface) continue;
    for (int v : f.v)
      if (std::abs(mesh.vertices[v].z - z_top) > plane_tol)
        throw std::runtime_error("TopSurface facet vertex lies off the top plane");
  }
}

QualityReport mesh_quality_report(const Mesh& mesh) {
  QualityReport q;
  q.node_count = mesh.num_vertices();
  q.element_count = mesh.num_tets();
  if (mesh.tets.empty()) return q;

  q.min_tet_volume = mesh.tet_volume(0);
  q.max_tet_volume = q.min_tet_volume;
  double max_cos_dihedral = -1.0;
  for (int t = 0; t < mesh.num_tets(); ++t) {
    const double vol = mesh.tet_volume(t);
    q.total_volume += vol;
    q.min_tet_volume = std::min(q.min_tet_volume, vol);
    q.max_tet_volume = std::max(q.max_tet_volume, vol);

    Vec3 n[4];
    for (int f = 0; f < 4; ++f) {
      const auto& lf = tet_face_vertices[f];
      Vec3 nf = cross(mesh.vertices[mesh.tets[t][lf[1]]] - mesh.vertices[mesh.tets[t][lf[0]]],
                      mesh.vertices[mesh.tets[t][lf[2]]] - mesh.vertices[mesh.tets[t][lf[0]]]);
      const double len = norm(nf);
      n[f] = {nf.x / len, nf.y / len, nf.z / len};
    }
    // Each pair of faces meets along one edge; with outward normals the
    // interior dihedral there is acos(-n_a . n_b).
    for (int a = 0; a < 4; ++a)
      for (int b = a + 1; b < 4; ++b)
        max_cos_dihedral = std::max(max_cos_dihedral, -dot(n[a], n[b]));
  }
  q.min_dihedral_deg = std::acos(std::clamp(max_cos_dihedral, -1.0, 1.0)) * 180.0 / std::numbers::pi;

  for (int f = 0; f < mesh.num_facets(); ++f) {
    if (mesh.facets[f].tag == BoundaryTag::TopSurface)
      q.area_top_surface += mesh.facet_area(f);
    else
      q.area_surface += mesh.facet_area(f);
  }
  return q;
}

} // namespace tlesim
