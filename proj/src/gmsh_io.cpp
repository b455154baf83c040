#include "tlesim/gmsh_io.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace tlesim {

namespace {

std::string next_content_line(std::istream& in) {
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.pop_back();
    if (!line.empty()) return line;
  }
  return {};
}

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw std::runtime_error("gmsh file '" + path + "': " + what);
}

} // namespace

Mesh load_gmsh_mesh(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open mesh file '" + path + "'");

  if (next_content_line(in) != "$MeshFormat") fail(path, "missing $MeshFormat section");
  {
    std::istringstream fmt(next_content_line(in));
    std::string version;
    int file_type = -1, data_size = -1;
    fmt >> version >> file_type >> data_size;
    if (version != "2.2" || file_type != 0)
      fail(path, "unsupported mesh format version '" + version + "' (need ASCII 2.2)");
  }
  if (next_content_line(in) != "$EndMeshFormat") fail(path, "missing $EndMeshFormat");

  if (next_content_line(in) != "$Nodes") fail(path, "missing $Nodes section");
  size_t node_count = 0;
  {
    std::istringstream count(next_content_line(in));
    if (!(count >> node_count)) fail(path, "unreadable node count");
  }
  std::vector<Vec3> vertices(node_count);
  std::vector<bool> seen(node_count, false);
  for (size_t i = 0; i < node_count; ++i) {
    std::istringstream row(next_content_line(in));
    long id = 0;
    Vec3 p;
    if (!(row >> id >> p.x >> p.y >> p.z)) fail(path, "unreadable node line");
    if (id < 1 || static_cast<size_t>(id) > node_count)
      fail(path, "node id " + std::to_string(id) + " outside 1.." + std::to_string(node_count));
    vertices[id - 1] = p;
    seen[id - 1] = true;
  }
  if (std::find(seen.begin(), seen.end(), false) != seen.end()) fail(path, "node ids not contiguous");
  if (next_content_line(in) != "$EndNodes") fail(path, "missing $EndNodes");

  if (next_content_line(in) != "$Elements") fail(path, "missing $Elements section");
  size_t elem_count = 0;
  {
    std::istringstream count(next_content_line(in));
    if (!(count >> elem_count)) fail(path, "unreadable element count");
  }

  std::vector<std::array<int, 4>> tets;
  struct FileTriangle {
    std::array<int, 3> v;
    int tag;
  };
  std::vector<FileTriangle> triangles;
  for (size_t i = 0; i < elem_count; ++i) {
    std::istringstream row(next_content_line(in));
    long id = 0;
    int type = 0, ntags = 0;
    if (!(row >> id >> type >> ntags)) fail(path, "unreadable element line");
    int physical = 0;
    for (int t = 0; t < ntags; ++t) {
      int tag = 0;
      if (!(row >> tag)) fail(path, "element tag list shorter than declared");
      if (t == 0) physical = tag;
    }
    const int nodes_needed = type == 2 ? 3 : type == 4 ? 4 : 0;
    if (nodes_needed == 0)
      fail(path, "unsupported element type " + std::to_string(type) +
                     " (only 3-node triangles and 4-node tetrahedra)");
    std::array<int, 4> conn{};
    for (int n = 0; n < nodes_needed; ++n) {
      long v = 0;
      if (!(row >> v)) fail(path, "element node list shorter than expected");
      if (v < 1 || static_cast<size_t>(v) > node_count)
        fail(path, "element references unknown node " + std::to_string(v));
      conn[n] = static_cast<int>(v - 1);
    }
    if (type == 4) {
      if (signed_tet_volume(vertices[conn[0]], vertices[conn[1]], vertices[conn[2]],
                            vertices[conn[3]]) < 0.0)
        std::swap(conn[2], conn[3]);
      tets.push_back(conn);
    } else {
      if (physical != 1 && physical != 2)
        fail(path, "boundary facet physical tag " + std::to_string(physical) + " outside {1, 2}");
      triangles.push_back({{conn[0], conn[1], conn[2]}, physical});
    }
  }
  if (next_content_line(in) != "$EndElements") fail(path, "missing $EndElements");
  if (tets.empty()) fail(path, "no tetrahedra");

  Mesh mesh;
  mesh.vertices = std::move(vertices);
  mesh.tets = std::move(tets);

  // The file's triangles must be exactly the boundary of the tet mesh; take
  // orientation and ownership from the tets, tags from the file.
  auto skin = extract_boundary(mesh.vertices, mesh.tets);
  std::map<std::array<int, 3>, size_t> by_key;
  for (size_t f = 0; f < skin.size(); ++f) {
    std::array<int, 3> key = skin[f].v;
    std::sort(key.begin(), key.end());
    by_key[key] = f;
  }
  std::vector<int> assigned(skin.size(), 0);
  for (const auto& tri : triangles) {
    std::array<int, 3> key = tri.v;
    std::sort(key.begin(), key.end());
    auto it = by_key.find(key);
    if (it == by_key.end())
      fail(path, "triangle (" + std::to_string(tri.v[0] + 1) + " " + std::to_string(tri.v[1] + 1) +
                     " " + std::to_string(tri.v[2] + 1) + ") is not a boundary face of the tet mesh");
    if (assigned[it->second]++)
      fail(path, "duplicate boundary triangle");
    skin[it->second].tag = static_cast<BoundaryTag>(tri.tag);
  }
  if (triangles.size() != skin.size())
    fail(path, "non-watertight boundary: file lists " + std::to_string(triangles.size()) +
                   " triangles but the tet mesh boundary has " + std::to_string(skin.size()));

  mesh.facets = std::move(skin);
  validate_mesh(mesh);
  return mesh;
}

void write_gmsh_mesh(const Mesh& mesh, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out.precision(17);

  out << "$MeshFormat\n2.2 0 8\n$EndMeshFormat\n";
  out << "$Nodes\n" << mesh.num_vertices() << "\n";
  for (int i = 0; i < mesh.num_vertices(); ++i) {
    const auto& v = mesh.vertices[i];
    out << (i + 1) << " " << v.x << " " << v.y << " " << v.z << "\n";
  }
  out << "$EndNodes\n";

  out << "$Elements\n" << (mesh.num_facets() + mesh.num_tets()) << "\n";
  long id = 1;
  for (const auto& f : mesh.facets) {
    out << id++ << " 2 2 " << static_cast<int>(f.tag) << " " << static_cast<int>(f.tag) << " "
        << (f.v[0] + 1) << " " << (f.v[1] + 1) << " " << (f.v[2] + 1) << "\n";
  }
  for (const auto& t : mesh.tets) {
    out << id++ << " 4 2 1 1 " << (t[0] + 1) << " " << (t[1] + 1) << " " << (t[2] + 1) << " "
        << (t[3] + 1) << "\n";
  }
  out << "$EndElements\n";
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

} // namespace tlesim
