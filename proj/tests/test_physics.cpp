#include <doctest.h>

#include <cmath>
#include <string>

#include "tlesim/constants.hpp"
#include "tlesim/physics.hpp"

using namespace tlesim;

namespace {

const Material& tantalum() {
  static MaterialRegistry registry = load_material_database(std::string(TLESIM_DATA_DIR) +
                                                            "/materials.json");
  return registry.get("Ta");
}

LaserSpec reference_laser() {
  LaserSpec laser;
  laser.power = 280.0;
  laser.wavelength = 1030e-9;
  laser.gaussian_radius = 750e-6;
  return laser;
}

} // namespace

TEST_CASE("physical constants carry their defined values") {
  CHECK(constants::avogadro == 6.02214076e23);
  CHECK(constants::boltzmann == 1.380649e-23);
  CHECK(constants::stefan_boltzmann == 5.670374419e-8);
  CHECK(constants::speed_of_light == 2.99792458e8);
  CHECK(constants::gas_constant ==
        doctest::Approx(8.31446261815324).epsilon(1e-14));
}

TEST_CASE("laser flux peak, falloff and attenuation") {
  const LaserSpec laser = reference_laser();
  const double peak = laser_flux(laser, 0.75, 0.0, 0.0);
  CHECK(peak == doctest::Approx(39611896.94731618).epsilon(1e-12));
  // Profile carries exp(-r^2/omega^2): 1/e at r = omega.
  CHECK(laser_flux(laser, 0.75, 750e-6, 0.0) == doctest::Approx(peak / M_E).epsilon(1e-12));
  CHECK(laser_flux(laser, 0.75, 0.0, -750e-6) == doctest::Approx(peak / M_E).epsilon(1e-12));
  CHECK(laser_flux(laser, 0.75, 0.0, 0.0, 2.0) ==
        doctest::Approx(peak * std::exp(-2.0)).epsilon(1e-12));
  // Off-center beam.
  LaserSpec shifted = laser;
  shifted.center_x = 1e-4;
  CHECK(laser_flux(shifted, 0.75, 1e-4, 0.0) == doctest::Approx(peak).epsilon(1e-12));
  // Full reflection absorbs nothing.
  CHECK(laser_flux(laser, 1.0, 0.0, 0.0) == 0.0);
}

TEST_CASE("radiative loss and its linearization") {
  CHECK(radiative_flux(0.21, 3293.0, 300.0) ==
        doctest::Approx(1400128.9557784384).epsilon(1e-12));
  CHECK(radiative_flux(0.21, 300.0, 300.0) == 0.0);
  CHECK(radiative_flux(1.0, 200.0, 300.0) < 0.0);  // cold body absorbs
  CHECK(radiative_flux_derivative(0.21, 3293.0) ==
        doctest::Approx(4.0 * 0.21 * constants::stefan_boltzmann * 3293.0 * 3293.0 * 3293.0)
            .epsilon(1e-14));
  for (double T : {500.0, 2000.0, 3500.0}) {
    const double h = 1e-3 * T;
    const double fd =
        (radiative_flux(0.4, T + h, 300.0) - radiative_flux(0.4, T - h, 300.0)) / (2.0 * h);
    CHECK(radiative_flux_derivative(0.4, T) == doctest::Approx(fd).epsilon(1e-5));
  }
}

TEST_CASE("evaporation fluxes at the tantalum melting point") {
  const Material& ta = tantalum();
  CHECK(evaporative_mass_flux(ta, 3293.0) ==
        doctest::Approx(0.000991762578342212).epsilon(1e-9));
  // Specific enthalpy term plus translational transport term.
  CHECK(evaporative_heat_flux(ta, 3293.0) ==
        doctest::Approx(4242.619217113375).epsilon(1e-9));
  const double specific = 733000.0 / 0.18094788;
  CHECK(specific == doctest::Approx(4050890.2342486684).epsilon(1e-12));
}

TEST_CASE("evaporative heat flux derivative agrees with a difference quotient") {
  const Material& ta = tantalum();
  for (double T : {2500.0, 3000.0, 3293.0, 3600.0}) {
    const double h = 1e-4 * T;
    const double fd =
        (evaporative_heat_flux(ta, T + h) - evaporative_heat_flux(ta, T - h)) / (2.0 * h);
    CHECK(evaporative_heat_flux_derivative(ta, T) == doctest::Approx(fd).epsilon(1e-6));
  }
}

TEST_CASE("absorption cross section on and off resonance") {
  Transition line{1030e-9, 1e8};
  CHECK(absorption_cross_section(line, 1030e-9) ==
        doctest::Approx(5.065424373785755e-13).epsilon(1e-12));
  Transition ta_line{859e-9, 1e6};
  CHECK(absorption_cross_section(ta_line, 859e-9) ==
        doctest::Approx(3.5231222569077246e-13).epsilon(1e-12));
  // 1030 nm laser against the 859 nm line: detuning kills the cross section.
  const double detuned = absorption_cross_section(ta_line, 1030e-9);
  CHECK(detuned == doctest::Approx(3.5231222569077246e-13 * 1.886285482979148e-18)
                       .epsilon(1e-9));
  CHECK(detuned < 1e-29);
}

TEST_CASE("nearest transition picks the smallest wavelength distance") {
  Material mat = tantalum();
  mat.transitions = {{379.83e-9, 6.4e7}, {550.65e-9, 3.0e6}};
  const auto line = nearest_transition(mat, 515e-9);
  REQUIRE(line.has_value());
  CHECK(line->wavelength == doctest::Approx(550.65e-9));
  mat.transitions.clear();
  CHECK_FALSE(nearest_transition(mat, 515e-9).has_value());
}

TEST_CASE("optical depth closed form on a synthetic resonant line") {
  Material mat = tantalum();
  mat.transitions = {{500e-9, 1e7}};
  // Fix the vapor pressure at exactly 1 Pa for a hand-checkable value.
  mat.vapor = {0.0, 0.0, 0.0, 0.0, 1.0};
  LaserSpec laser;
  laser.power = 100.0;
  laser.wavelength = 500e-9;
  laser.gaussian_radius = 1e-3;
  laser.attenuation_enabled = true;
  ChamberSpec chamber;
  chamber.beam_path = 0.5;
  CHECK(optical_depth(mat, 2000.0, laser, chamber) ==
        doctest::Approx(3050588720.6107144).epsilon(1e-9));
}

TEST_CASE("tantalum plume is optically thin at the melting point") {
  const Material& ta = tantalum();
  LaserSpec laser = reference_laser();
  laser.attenuation_enabled = true;
  ChamberSpec chamber;
  const double tau = optical_depth(ta, 3293.0, laser, chamber);
  CHECK(tau == doctest::Approx(1.330655982059256e-8).epsilon(1e-9));
  CHECK(tau > 1e-10);
  CHECK(tau < 1e-6);
}

TEST_CASE("optical depth is zero when disabled or lineless") {
  const Material& ta = tantalum();
  LaserSpec laser = reference_laser();
  ChamberSpec chamber;
  CHECK(optical_depth(ta, 3293.0, laser, chamber) == 0.0);  // attenuation off
  laser.attenuation_enabled = true;
  Material bare = ta;
  bare.transitions.clear();
  CHECK(optical_depth(bare, 3293.0, laser, chamber) == 0.0);
}

TEST_CASE("spec validation rejects nonphysical setups") {
  LaserSpec laser = reference_laser();
  CHECK_NOTHROW(validate(laser));
  laser.power = -1.0;
  CHECK_THROWS(validate(laser));
  laser = reference_laser();
  laser.gaussian_radius = 0.0;
  CHECK_THROWS(validate(laser));

  ChamberSpec chamber;
  CHECK_NOTHROW(validate(chamber, reference_laser()));
  chamber.ambient_temperature = 0.0;
  CHECK_THROWS(validate(chamber, reference_laser()));
  chamber = ChamberSpec{};
  chamber.beam_path = 1e-4;  // shorter than the beam waist
  CHECK_THROWS(validate(chamber, reference_laser()));
}
