#pragma once

#include <memory>
#include <vector>

#include "tlesim/mesh.hpp"

namespace tlesim {

// Nodal temperature field (K) on a shared mesh, with the simulation time it
// belongs to. Values are kept at or above 1 K by the solver.
struct TemperatureField {
  std::shared_ptr<const Mesh> mesh;
  std::vector<double> values;
  double time = 0.0;
};

TemperatureField uniform_field(std::shared_ptr<const Mesh> mesh, double temperature,
                               double time = 0.0);

} // namespace tlesim
