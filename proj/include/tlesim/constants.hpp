#pragma once

// Physical constants (SI, CODATA 2018 exact values).
namespace tlesim::constants {

inline constexpr double avogadro = 6.02214076e23;        // 1/mol
inline constexpr double boltzmann = 1.380649e-23;        // J/K
inline constexpr double stefan_boltzmann = 5.670374419e-8; // W/(m^2 K^4)
inline constexpr double gas_constant = avogadro * boltzmann; // J/(mol K)
inline constexpr double speed_of_light = 2.99792458e8;   // m/s

} // namespace tlesim::constants
