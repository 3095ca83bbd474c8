#pragma once

// CODATA 2018 values, SI units throughout. Energies are reported to users
// in kelvin via E / k_B; everything internal stays in joules and meters.

namespace dwsim {
namespace constants {

inline constexpr double pi = 3.14159265358979323846;

inline constexpr double epsilon0 = 8.8541878128e-12;   // F/m
inline constexpr double k_boltzmann = 1.380649e-23;    // J/K
inline constexpr double hbar = 1.054571817e-34;        // J*s
inline constexpr double elementary_charge = 1.602176634e-19;  // C
inline constexpr double atomic_mass_unit = 1.66053906660e-27; // kg
inline constexpr double electron_mass = 9.1093837015e-31;     // kg

// q_a*q_b / (4 pi eps0) for two elementary charges, J*m
inline constexpr double coulomb_e2 =
    elementary_charge * elementary_charge / (4.0 * pi * epsilon0);

}  // namespace constants

inline double joules_to_kelvin(double e) { return e / constants::k_boltzmann; }
inline double kelvin_to_joules(double t) { return t * constants::k_boltzmann; }

}  // namespace dwsim
