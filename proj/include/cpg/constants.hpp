#pragma once

#include <numbers>

namespace cpg::constants {

// CODATA 2018, SI.
inline constexpr double hbar = 1.054571817e-34;          // J s
inline constexpr double c = 299792458.0;                 // m / s
inline constexpr double epsilon0 = 8.8541878128e-12;     // F / m
inline constexpr double bohr_radius = 5.29177210903e-11; // m
inline constexpr double electron_volt = 1.602176634e-19; // J

inline constexpr double pi = std::numbers::pi;

/// Angular frequency (rad/s) of a photon with energy 1 eV.
inline constexpr double ev_to_rad_per_s = electron_volt / hbar;

/// 4 pi eps0 a0^3: one atomic unit of polarizability in C m^2 / V.
inline constexpr double au_polarizability = 4.0 * pi * epsilon0 * bohr_radius * bohr_radius * bohr_radius;

} // namespace cpg::constants
