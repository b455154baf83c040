#include "tlesim/field.hpp"

#include <stdexcept>

namespace tlesim {

TemperatureField uniform_field(std::shared_ptr<const Mesh> mesh, double temperature, double time) {
  if (!mesh) throw std::invalid_argument("uniform_field: null mesh");
  if (!(temperature > 0.0)) throw std::invalid_argument("uniform_field: temperature must be positive");
  TemperatureField field;
  field.mesh = std::move(mesh);
  field.values.assign(static_cast<size_t>(field.mesh->num_vertices()), temperature);
  field.time = time;
  return field;
}

} // namespace tlesim
