#pragma once

#include <string>

#include "tlesim/mesh.hpp"

namespace tlesim {

// Reads an ASCII Gmsh v2.2 file restricted to 4-node tetrahedra (type 4) and
// 3-node boundary triangles (type 2). The first element tag is the physical
// tag: 1 marks the laser-facing top surface, 2 the remaining boundary. Node
// ids are 1-based in the file and converted to 0-based indices. The triangle
// set must cover the tet mesh boundary exactly (watertight skin); anything
// else throws std::runtime_error with the offending detail.
Mesh load_gmsh_mesh(const std::string& path);

// Writes the same subset; coordinates stay in meters. load_gmsh_mesh on the
// produced file reconstructs an identical mesh.
void write_gmsh_mesh(const Mesh& mesh, const std::string& path);

} // namespace tlesim
