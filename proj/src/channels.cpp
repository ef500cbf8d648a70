#include "cpg/channels.hpp"

#include "cpg/constants.hpp"
#include "cpg/errors.hpp"

#include <cmath>

namespace cpg {

DiffractionChannel make_channel(int j, double kx0, double ky, double xi, double period) {
    if (!(period > 0.0)) throw InputError("grating period must be positive");
    const double zone = constants::pi / period;
    if (!(std::abs(kx0) <= zone * (1.0 + 1e-12)))
        throw InputError("Bloch wavevector kx0 outside the first Brillouin zone");
    if (!(xi >= 0.0)) throw InputError("imaginary frequency xi must be non-negative");
    DiffractionChannel ch;
    ch.j = j;
    ch.kx0 = kx0;
    ch.ky = ky;
    ch.xi = xi;
    ch.kx = kx0 + 2.0 * zone * j;
    ch.kappa = std::hypot(ch.kx, ky, xi / constants::c);
    return ch;
}

PolarizationOverlap polarization_overlap(const DiffractionChannel& out, const DiffractionChannel& in) {
    if (out.kx0 != in.kx0 || out.ky != in.ky || out.xi != in.xi)
        throw InputError("polarization overlap between channels of different Bloch families");
    if (!(out.xi > 0.0)) throw InputError("singular node: polarization overlaps require xi > 0");

    const double q0 = out.xi / constants::c;
    const double ky = out.ky;
    const double transverse = q0 * q0 + ky * ky;

    PolarizationOverlap o;
    const double hh = -(out.kx * in.kx + out.kappa * in.kappa) / transverse;
    o.value[index(Polarization::H)][index(Polarization::H)] = hh;
    if (ky == 0.0) {
        o.value[index(Polarization::E)][index(Polarization::E)] = 1.0;
        return o;
    }
    const double ratio = ky / q0;
    o.value[index(Polarization::E)][index(Polarization::E)] = 1.0 + ratio * ratio * (1.0 - hh);
    const double eh = ky * (in.kx * out.kappa + out.kx * in.kappa) / (q0 * transverse);
    o.value[index(Polarization::E)][index(Polarization::H)] = eh;
    o.value[index(Polarization::H)][index(Polarization::E)] = -eh;
    return o;
}

} // namespace cpg

namespace cpg {

std::array<double, 2> tangential_unit_vector(const DiffractionChannel& ch, Polarization p, Direction dir) {
    if (!(ch.xi > 0.0)) throw InputError("singular node: polarization vectors require xi > 0");
    const double q0 = ch.xi / constants::c;
    const double sigma = std::hypot(q0, ch.ky);
    if (p == Polarization::H) {
        const double sign = dir == Direction::up ? -1.0 : 1.0;
        return {sign * ch.kappa / sigma, 0.0};
    }
    return {ch.ky * ch.kx / (q0 * sigma), sigma / q0};
}

} // namespace cpg
