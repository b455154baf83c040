#pragma once

#include <string>

#include "tlesim/material.hpp"
#include "tlesim/solver.hpp"

namespace tlesim {

// Errors raised while reading or validating a run configuration. The message
// always names the offending file and field.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Where the mesh comes from: generated cylinder or a Gmsh file on disk.
// Exactly one of the two is active.
struct MeshSpec {
  bool generated = true;
  double diameter = 0.0;   // m
  double length = 0.0;     // m
  int refinement = 0;
  std::string path;        // Gmsh v2.2 file when !generated
};

// A full run description parsed from a JSON config file. Laboratory units
// (mm, um, nm, W, K) appear only in the JSON field names; everything stored
// here is already SI.
struct RunConfig {
  std::string material;
  std::string database;    // material database path, resolved
  MeshSpec mesh;
  LaserSpec laser;
  ChamberSpec chamber;
  SolverControls controls;
  std::string output_dir = ".";
  std::string origin;      // config file path, for error messages
};

// Parses the JSON text of a config file. Unknown keys are rejected so unit
// typos (power vs power_W) cannot pass silently. `origin` is used in error
// messages and to resolve relative database/mesh paths.
RunConfig parse_run_config(const std::string& json_text, const std::string& origin);
RunConfig load_run_config(const std::string& path);

// Builds the mesh and looks up the material, yielding a solver-ready case.
CaseConfig resolve_case(const RunConfig& run, const MaterialRegistry& registry);
CaseConfig resolve_case(const RunConfig& run);

// JSON manifest of everything the solve will use: resolved material record,
// mesh provenance and counts, laser/chamber/solver numbers in SI, and the
// physical constants baked into the binary. Two runs of the same build on the
// same config produce bitwise-identical manifests.
std::string run_manifest_json(const RunConfig& run, const CaseConfig& resolved,
                              const std::string& command);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace tlesim
