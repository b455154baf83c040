#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>

#include "tlesim/calibrate.hpp"
#include "tlesim/config_io.hpp"
#include "tlesim/constants.hpp"
#include "tlesim/field.hpp"
#include "tlesim/gmsh_io.hpp"
#include "tlesim/material.hpp"
#include "tlesim/mesh.hpp"
#include "tlesim/physics.hpp"
#include "tlesim/postprocess.hpp"
#include "tlesim/solver.hpp"
#include "tlesim/vtk_io.hpp"

namespace py = pybind11;
using namespace tlesim;

#ifndef TLESIM_VERSION
#define TLESIM_VERSION "dev"
#endif

PYBIND11_MODULE(_tlesim, m) {
  m.doc() = "Thermal simulator and calibration toolkit for laser-heated "
            "cylindrical evaporation sources";
  m.attr("__version__") = TLESIM_VERSION;

  auto c = m.def_submodule("constants", "physical constants, SI");
  c.attr("avogadro") = constants::avogadro;
  c.attr("boltzmann") = constants::boltzmann;
  c.attr("stefan_boltzmann") = constants::stefan_boltzmann;
  c.attr("gas_constant") = constants::gas_constant;
  c.attr("speed_of_light") = constants::speed_of_light;

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<NonConvergence>(m, "NonConvergence", PyExc_RuntimeError);
  py::register_exception<NoSignChange>(m, "NoSignChange", PyExc_RuntimeError);
  py::register_exception<NoBracket>(m, "NoBracket", PyExc_RuntimeError);

  // --- mesh ---------------------------------------------------------------
  py::class_<Mesh, std::shared_ptr<Mesh>>(m, "Mesh")
      .def_property_readonly("num_vertices", &Mesh::num_vertices)
      .def_property_readonly("num_tets", &Mesh::num_tets)
      .def_property_readonly("num_facets", &Mesh::num_facets)
      .def("tet_volume", &Mesh::tet_volume, py::arg("tet"))
      .def("facet_area", &Mesh::facet_area, py::arg("facet"))
      .def("vertex",
           [](const Mesh& mesh, int i) {
             const Vec3& v = mesh.vertices.at(static_cast<size_t>(i));
             return py::make_tuple(v.x, v.y, v.z);
           },
           py::arg("index"));

  py::class_<QualityReport>(m, "QualityReport")
      .def_readonly("node_count", &QualityReport::node_count)
      .def_readonly("element_count", &QualityReport::element_count)
      .def_readonly("total_volume", &QualityReport::total_volume)
      .def_readonly("min_tet_volume", &QualityReport::min_tet_volume)
      .def_readonly("max_tet_volume", &QualityReport::max_tet_volume)
      .def_readonly("min_dihedral_deg", &QualityReport::min_dihedral_deg)
      .def_readonly("area_top_surface", &QualityReport::area_top_surface)
      .def_readonly("area_surface", &QualityReport::area_surface);

  m.def("generate_cylinder_mesh",
        [](double diameter, double length, int refinement) {
          return std::make_shared<Mesh>(generate_cylinder_mesh(diameter, length, refinement));
        },
        py::arg("diameter"), py::arg("length"), py::arg("refinement"));
  m.def("load_gmsh_mesh",
        [](const std::string& path) { return std::make_shared<Mesh>(load_gmsh_mesh(path)); },
        py::arg("path"));
  m.def("write_gmsh_mesh", &write_gmsh_mesh, py::arg("mesh"), py::arg("path"));
  m.def("mesh_quality_report", &mesh_quality_report, py::arg("mesh"));

  // --- materials ----------------------------------------------------------
  py::class_<VaporPressureFit>(m, "VaporPressureFit")
      .def(py::init<>())
      .def_readwrite("a", &VaporPressureFit::a)
      .def_readwrite("b", &VaporPressureFit::b)
      .def_readwrite("c", &VaporPressureFit::c)
      .def_readwrite("d", &VaporPressureFit::d)
      .def_readwrite("reference_pa", &VaporPressureFit::reference_pa);

  py::class_<Transition>(m, "Transition")
      .def(py::init<>())
      .def_readwrite("wavelength", &Transition::wavelength)
      .def_readwrite("gamma", &Transition::gamma);

  py::class_<Material>(m, "Material")
      .def(py::init<>())
      .def_readwrite("name", &Material::name)
      .def_readwrite("molar_mass", &Material::molar_mass)
      .def_readwrite("atomic_mass", &Material::atomic_mass)
      .def_readwrite("density", &Material::density)
      .def_readwrite("specific_heat", &Material::specific_heat)
      .def_readwrite("thermal_conductivity", &Material::thermal_conductivity)
      .def_readwrite("emissivity", &Material::emissivity)
      .def_readwrite("reflectivity", &Material::reflectivity)
      .def_readwrite("enthalpy_vaporization", &Material::enthalpy_vaporization)
      .def_readwrite("melting_point", &Material::melting_point)
      .def_readwrite("vapor", &Material::vapor)
      .def_readwrite("transitions", &Material::transitions)
      .def_readwrite("source", &Material::source);

  py::class_<MaterialRegistry>(m, "MaterialRegistry")
      .def(py::init<>())
      .def("add", &MaterialRegistry::add, py::arg("material"))
      .def("get", &MaterialRegistry::get, py::arg("name"),
           py::return_value_policy::reference_internal)
      .def("names", &MaterialRegistry::names);

  m.def("load_material_database", &load_material_database, py::arg("path"));
  m.def("parse_material_database", &parse_material_database, py::arg("json_text"),
        py::arg("origin"));
  m.def("vapor_pressure", &vapor_pressure, py::arg("material"), py::arg("temperature"));
  m.def("reflectivity_at", &reflectivity_at, py::arg("material"), py::arg("wavelength"));

  // --- beam, chamber, flux laws -------------------------------------------
  py::class_<LaserSpec>(m, "LaserSpec")
      .def(py::init<>())
      .def_readwrite("power", &LaserSpec::power)
      .def_readwrite("wavelength", &LaserSpec::wavelength)
      .def_readwrite("gaussian_radius", &LaserSpec::gaussian_radius)
      .def_readwrite("center_x", &LaserSpec::center_x)
      .def_readwrite("center_y", &LaserSpec::center_y)
      .def_readwrite("attenuation_enabled", &LaserSpec::attenuation_enabled);

  py::class_<ChamberSpec>(m, "ChamberSpec")
      .def(py::init<>())
      .def_readwrite("ambient_temperature", &ChamberSpec::ambient_temperature)
      .def_readwrite("beam_path", &ChamberSpec::beam_path);

  m.def("laser_flux", &laser_flux, py::arg("laser"), py::arg("reflectivity"), py::arg("x"),
        py::arg("y"), py::arg("optical_depth") = 0.0);
  m.def("radiative_flux", &radiative_flux, py::arg("emissivity"), py::arg("temperature"),
        py::arg("ambient_temperature"));
  m.def("evaporative_mass_flux", &evaporative_mass_flux, py::arg("material"),
        py::arg("temperature"));
  m.def("evaporative_heat_flux", &evaporative_heat_flux, py::arg("material"),
        py::arg("temperature"));
  m.def("absorption_cross_section", &absorption_cross_section, py::arg("transition"),
        py::arg("laser_wavelength"));
  m.def("nearest_transition", &nearest_transition, py::arg("material"),
        py::arg("laser_wavelength"));
  m.def("optical_depth", &optical_depth, py::arg("material"), py::arg("surface_temperature"),
        py::arg("laser"), py::arg("chamber"));

  // --- fields and solves ---------------------------------------------------
  py::class_<TemperatureField>(m, "TemperatureField")
      .def_property_readonly(
          "mesh", [](const TemperatureField& f) { return std::const_pointer_cast<Mesh>(f.mesh); })
      .def_readwrite("values", &TemperatureField::values)
      .def_readwrite("time", &TemperatureField::time);

  m.def("uniform_field",
        [](std::shared_ptr<Mesh> mesh, double temperature, double time) {
          return uniform_field(std::move(mesh), temperature, time);
        },
        py::arg("mesh"), py::arg("temperature"), py::arg("time") = 0.0);
  m.def("export_vtk", &export_vtk, py::arg("field"), py::arg("path"),
        py::arg("title") = "thermal field");

  py::class_<SolverControls>(m, "SolverControls")
      .def(py::init<>())
      .def_readwrite("newton_tol", &SolverControls::newton_tol)
      .def_readwrite("newton_max_iter", &SolverControls::newton_max_iter)
      .def_readwrite("dt_initial", &SolverControls::dt_initial)
      .def_readwrite("dt_growth", &SolverControls::dt_growth)
      .def_readwrite("dt_max", &SolverControls::dt_max)
      .def_readwrite("steady_rate_tol", &SolverControls::steady_rate_tol)
      .def_readwrite("steady_balance_tol", &SolverControls::steady_balance_tol)
      .def_readwrite("max_time", &SolverControls::max_time);

  py::class_<CaseConfig>(m, "CaseConfig")
      .def(py::init<>())
      .def_property(
          "mesh", [](const CaseConfig& c) { return std::const_pointer_cast<Mesh>(c.mesh); },
          [](CaseConfig& c, std::shared_ptr<Mesh> mesh) { c.mesh = std::move(mesh); })
      .def_readwrite("material", &CaseConfig::material)
      .def_readwrite("laser", &CaseConfig::laser)
      .def_readwrite("chamber", &CaseConfig::chamber)
      .def_readwrite("controls", &CaseConfig::controls);

  py::class_<StepRecord>(m, "StepRecord")
      .def_readonly("time", &StepRecord::time)
      .def_readonly("dt", &StepRecord::dt)
      .def_readonly("newton_iterations", &StepRecord::newton_iterations)
      .def_readonly("max_rate", &StepRecord::max_rate)
      .def_readonly("balance_residual", &StepRecord::balance_residual)
      .def_readonly("optical_depth", &StepRecord::optical_depth);

  py::class_<PowerBreakdown>(m, "PowerBreakdown")
      .def_readonly("absorbed", &PowerBreakdown::absorbed)
      .def_readonly("radiated", &PowerBreakdown::radiated)
      .def_readonly("evaporated", &PowerBreakdown::evaporated)
      .def("balance_residual", &PowerBreakdown::balance_residual);

  py::class_<TraceSample>(m, "TraceSample")
      .def_readonly("time", &TraceSample::time)
      .def_readonly("spot_temperature", &TraceSample::spot_temperature)
      .def_readonly("peak_temperature", &TraceSample::peak_temperature);

  py::class_<SteadyResult>(m, "SteadyResult")
      .def_readonly("field", &SteadyResult::field)
      .def_readonly("peak_temperature", &SteadyResult::peak_temperature)
      .def_readonly("peak_vertex", &SteadyResult::peak_vertex)
      .def_readonly("mass_rate", &SteadyResult::mass_rate)
      .def_readonly("melted", &SteadyResult::melted)
      .def_readonly("power", &SteadyResult::power)
      .def_readonly("history", &SteadyResult::history)
      .def_readonly("final_time", &SteadyResult::final_time);

  py::class_<TransientResult>(m, "TransientResult")
      .def_readonly("field", &TransientResult::field)
      .def_readonly("trace", &TransientResult::trace)
      .def_readonly("history", &TransientResult::history);

  m.def("run_to_steady", &run_to_steady, py::arg("config"),
        py::call_guard<py::gil_scoped_release>());
  m.def("advance_transient", &advance_transient, py::arg("config"), py::arg("initial"),
        py::arg("duration"),
        py::arg("laser_off_time") = std::numeric_limits<double>::infinity(),
        py::call_guard<py::gil_scoped_release>());

  // --- postprocessing -------------------------------------------------------
  py::class_<MeltPool>(m, "MeltPool")
      .def_readonly("area", &MeltPool::area)
      .def_readonly("facet_count", &MeltPool::facet_count)
      .def_readonly("any_molten", &MeltPool::any_molten);

  py::class_<BoundaryPowers>(m, "BoundaryPowers")
      .def_readonly("absorbed", &BoundaryPowers::absorbed)
      .def_readonly("radiated", &BoundaryPowers::radiated)
      .def_readonly("evaporated", &BoundaryPowers::evaporated);

  m.def("peak_temperature", &peak_temperature, py::arg("field"));
  m.def("total_mass_evaporation_rate", &total_mass_evaporation_rate, py::arg("field"),
        py::arg("material"));
  m.def("melt_pool", &melt_pool, py::arg("field"), py::arg("material"));
  m.def("integrate_boundary_powers", &integrate_boundary_powers, py::arg("field"),
        py::arg("material"), py::arg("laser"), py::arg("chamber"), py::arg("optical_depth"));
  m.def("rate_to_growth", &rate_to_growth, py::arg("mass_rate_kg_s"),
        py::arg("scale_mg_per_angstrom"));
  m.def("growth_to_rate", &growth_to_rate, py::arg("growth_angstrom_s"),
        py::arg("scale_mg_per_angstrom"));
  m.def("kg_per_s_to_mg_per_min", &kg_per_s_to_mg_per_min, py::arg("rate"));

  // --- calibration -----------------------------------------------------------
  py::class_<SteadyProbe>(m, "SteadyProbe")
      .def(py::init([](double peak_temperature, double mass_rate, bool melted) {
             return SteadyProbe{peak_temperature, mass_rate, melted};
           }),
           py::arg("peak_temperature") = 0.0, py::arg("mass_rate") = 0.0,
           py::arg("melted") = false)
      .def_readwrite("peak_temperature", &SteadyProbe::peak_temperature)
      .def_readwrite("mass_rate", &SteadyProbe::mass_rate)
      .def_readwrite("melted", &SteadyProbe::melted);

  m.def("probe_case", &probe_case, py::arg("config"), py::call_guard<py::gil_scoped_release>());
  m.def("make_cell_evaluator", &make_cell_evaluator, py::arg("base"));
  m.def("make_power_evaluator", &make_power_evaluator, py::arg("base"));
  m.def("make_rate_evaluator", &make_rate_evaluator, py::arg("base"));

  py::class_<SweepPoint>(m, "SweepPoint")
      .def_readonly("value", &SweepPoint::value)
      .def_readonly("peak_temperature", &SweepPoint::peak_temperature)
      .def_readonly("mass_rate", &SweepPoint::mass_rate);

  py::class_<SweepCurve>(m, "SweepCurve")
      .def_readonly("parameter", &SweepCurve::parameter)
      .def_readonly("points", &SweepCurve::points);

  m.def("sensitivity_sweep", &sensitivity_sweep, py::arg("base"), py::arg("parameter"),
        py::arg("values"), py::call_guard<py::gil_scoped_release>());
  m.def("sweep_parameter_names", &sweep_parameter_names);

  py::class_<ScanCell>(m, "ScanCell")
      .def_readonly("emissivity", &ScanCell::emissivity)
      .def_readonly("reflectivity", &ScanCell::reflectivity)
      .def_readonly("peak_temperature", &ScanCell::peak_temperature)
      .def_readonly("mass_rate", &ScanCell::mass_rate)
      .def_readonly("delta_t", &ScanCell::delta_t)
      .def_readonly("melted", &ScanCell::melted)
      .def_readonly("failed", &ScanCell::failed)
      .def_readonly("message", &ScanCell::message);

  py::class_<ScanGrid>(m, "ScanGrid")
      .def_readonly("epsilon_values", &ScanGrid::epsilon_values)
      .def_readonly("reflectivity_values", &ScanGrid::reflectivity_values)
      .def_readonly("melting_point", &ScanGrid::melting_point)
      .def_readonly("cells", &ScanGrid::cells)
      .def("at", &ScanGrid::at, py::arg("row"), py::arg("col"),
           py::return_value_policy::reference_internal)
      .def_property_readonly("rows", &ScanGrid::rows)
      .def_property_readonly("cols", &ScanGrid::cols);

  m.def("scan_epsilon_reflectivity", &scan_epsilon_reflectivity, py::arg("evaluate"),
        py::arg("epsilons"), py::arg("reflectivities"), py::arg("melting_point"),
        py::call_guard<py::gil_scoped_release>());
  m.def("default_epsilon_grid", &default_epsilon_grid);
  m.def("default_reflectivity_grid", &default_reflectivity_grid);

  py::class_<NeutralPoint>(m, "NeutralPoint")
      .def(py::init([](double emissivity, double reflectivity, double delta_t, int bisections) {
             return NeutralPoint{emissivity, reflectivity, delta_t, bisections};
           }),
           py::arg("emissivity") = 0.0, py::arg("reflectivity") = 0.0, py::arg("delta_t") = 0.0,
           py::arg("bisections") = 0)
      .def_readwrite("emissivity", &NeutralPoint::emissivity)
      .def_readwrite("reflectivity", &NeutralPoint::reflectivity)
      .def_readwrite("delta_t", &NeutralPoint::delta_t)
      .def_readwrite("bisections", &NeutralPoint::bisections);

  m.def("extract_neutral_line", &extract_neutral_line, py::arg("grid"), py::arg("evaluate"),
        py::arg("tolerance_K") = 2.0, py::arg("max_bisections") = 60,
        py::call_guard<py::gil_scoped_release>());

  py::class_<MeltingPowerResult>(m, "MeltingPowerResult")
      .def_readonly("power", &MeltingPowerResult::power)
      .def_readonly("peak_temperature", &MeltingPowerResult::peak_temperature)
      .def_readonly("iterations", &MeltingPowerResult::iterations)
      .def_readonly("brackets", &MeltingPowerResult::brackets);

  m.def("find_melting_power", &find_melting_power, py::arg("evaluate"), py::arg("target_K"),
        py::arg("ambient_K"), py::arg("power_max") = 2000.0, py::arg("tolerance_K") = 5.0,
        py::arg("max_iterations") = 60, py::call_guard<py::gil_scoped_release>());

  py::class_<ExperimentPoint>(m, "ExperimentPoint")
      .def(py::init([](double power, double rate, double sigma) {
             return ExperimentPoint{power, rate, sigma};
           }),
           py::arg("power") = 0.0, py::arg("rate") = 0.0, py::arg("sigma") = 0.0)
      .def_readwrite("power", &ExperimentPoint::power)
      .def_readwrite("rate", &ExperimentPoint::rate)
      .def_readwrite("sigma", &ExperimentPoint::sigma);

  py::class_<ExperimentSeries>(m, "ExperimentSeries")
      .def(py::init<>())
      .def_readwrite("element", &ExperimentSeries::element)
      .def_readwrite("diameter", &ExperimentSeries::diameter)
      .def_readwrite("wavelength", &ExperimentSeries::wavelength)
      .def_readwrite("points", &ExperimentSeries::points);

  m.def("load_experiment_series", &load_experiment_series, py::arg("path"));
  m.def("parse_experiment_series", &parse_experiment_series, py::arg("text"), py::arg("origin"));

  py::class_<RateFit>(m, "RateFit")
      .def_readonly("emissivity", &RateFit::emissivity)
      .def_readonly("reflectivity", &RateFit::reflectivity)
      .def_readonly("residual", &RateFit::residual)
      .def_readonly("simulated_rates", &RateFit::simulated_rates);

  m.def("fit_rate_curves", &fit_rate_curves, py::arg("candidates"), py::arg("data"),
        py::arg("evaluate"), py::call_guard<py::gil_scoped_release>());

  // --- config files ----------------------------------------------------------
  py::class_<MeshSpec>(m, "MeshSpec")
      .def(py::init<>())
      .def_readwrite("generated", &MeshSpec::generated)
      .def_readwrite("diameter", &MeshSpec::diameter)
      .def_readwrite("length", &MeshSpec::length)
      .def_readwrite("refinement", &MeshSpec::refinement)
      .def_readwrite("path", &MeshSpec::path);

  py::class_<RunConfig>(m, "RunConfig")
      .def(py::init<>())
      .def_readwrite("material", &RunConfig::material)
      .def_readwrite("database", &RunConfig::database)
      .def_readwrite("mesh", &RunConfig::mesh)
      .def_readwrite("laser", &RunConfig::laser)
      .def_readwrite("chamber", &RunConfig::chamber)
      .def_readwrite("controls", &RunConfig::controls)
      .def_readwrite("output_dir", &RunConfig::output_dir)
      .def_readwrite("origin", &RunConfig::origin);

  m.def("parse_run_config", &parse_run_config, py::arg("json_text"), py::arg("origin"));
  m.def("load_run_config", &load_run_config, py::arg("path"));
  m.def("resolve_case",
        py::overload_cast<const RunConfig&, const MaterialRegistry&>(&resolve_case),
        py::arg("run"), py::arg("registry"));
  m.def("resolve_case", py::overload_cast<const RunConfig&>(&resolve_case), py::arg("run"));
  m.def("run_manifest_json", &run_manifest_json, py::arg("run"), py::arg("resolved"),
        py::arg("command"));
}
