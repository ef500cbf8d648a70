#pragma once

#include <array>

namespace cpg {

/// Waveguide-type polarizations with respect to the groove direction y:
/// E has H_y = 0, H has E_y = 0.
enum class Polarization : int { E = 0, H = 1 };

inline constexpr std::array<Polarization, 2> all_polarizations{Polarization::E, Polarization::H};

inline constexpr int index(Polarization p) noexcept { return static_cast<int>(p); }

/// One Rayleigh order of a Bloch family at imaginary frequency.
struct DiffractionChannel {
    int j = 0;
    double kx0 = 0.0;   // Bloch wavevector, rad/m, inside [-pi/d, pi/d]
    double ky = 0.0;    // rad/m
    double xi = 0.0;    // rad/s
    double kx = 0.0;    // kx0 + 2 pi j / d
    double kappa = 0.0; // sqrt(kx^2 + ky^2 + xi^2/c^2)
};

/// Throws InputError if kx0 lies outside the first Brillouin zone or xi < 0. No folding.
DiffractionChannel make_channel(int j, double kx0, double ky, double xi, double period);

/// O[p][p'] = e_p^+(out) . e_p'^-(in), the bilinear product of the upward unit vector of the
/// outgoing order with the downward unit vector of the incoming order, continued to omega = i xi.
struct PolarizationOverlap {
    std::array<std::array<double, 2>, 2> value{};

    double operator()(Polarization p, Polarization q) const noexcept { return value[index(p)][index(q)]; }
};

/// Closed-form overlaps. Requires xi > 0 (the E-polarization vector diverges at xi = 0) and both
/// channels sharing (kx0, ky, xi); throws InputError otherwise.
PolarizationOverlap polarization_overlap(const DiffractionChannel& out, const DiffractionChannel& in);

} // namespace cpg

namespace cpg {

enum class Direction : int { up = +1, down = -1 };

/// Tangential (x, y) part of the unit vector e_p^{up/down} of a channel. Both components are
/// real on the imaginary axis; they fix a wave uniquely and are what mode matching needs.
std::array<double, 2> tangential_unit_vector(const DiffractionChannel& ch, Polarization p, Direction dir);

} // namespace cpg
