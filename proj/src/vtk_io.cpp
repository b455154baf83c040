#include "tlesim/vtk_io.hpp"

#include <fstream>
#include <stdexcept>

namespace tlesim {

void export_vtk(const TemperatureField& field, const std::string& path,
                const std::string& title) {
  if (!field.mesh) throw std::invalid_argument("export_vtk: field has no mesh");
  const Mesh& mesh = *field.mesh;
  if (static_cast<int>(field.values.size()) != mesh.num_vertices())
    throw std::invalid_argument("export_vtk: field size does not match mesh");

  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out.precision(17);

  out << "# vtk DataFile Version 3.0\n" << title << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << mesh.num_vertices() << " double\n";
  for (const Vec3& v : mesh.vertices) out << v.x << " " << v.y << " " << v.z << "\n";

  out << "CELLS " << mesh.num_tets() << " " << 5 * mesh.num_tets() << "\n";
  for (const auto& tet : mesh.tets)
    out << "4 " << tet[0] << " " << tet[1] << " " << tet[2] << " " << tet[3] << "\n";
  out << "CELL_TYPES " << mesh.num_tets() << "\n";
  for (int e = 0; e < mesh.num_tets(); ++e) out << "10\n";

  out << "POINT_DATA " << mesh.num_vertices() << "\n";
  out << "SCALARS temperature double 1\nLOOKUP_TABLE default\n";
  for (double t : field.values) out << t << "\n";
  if (!out) throw std::runtime_error("write to " + path + " failed");
}

} // namespace tlesim
