#pragma once

#include <string>

#include "tlesim/field.hpp"

namespace tlesim {

// Legacy ASCII VTK unstructured grid with the temperature as point data.
void export_vtk(const TemperatureField& field, const std::string& path,
                const std::string& title = "thermal field");

} // namespace tlesim
