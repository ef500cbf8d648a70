#include "cpg/plane_reflection.hpp"

#include "cpg/channels.hpp"
#include "cpg/constants.hpp"
#include "cpg/errors.hpp"

#include <Eigen/Dense>

#include <cmath>

namespace cpg {

FresnelPair fresnel(double eps, double k, double xi) {
    if (!(eps >= 1.0)) throw InputError("Fresnel coefficients require eps >= 1");
    if (!(xi > 0.0) && !(k > 0.0)) throw InputError("Fresnel coefficients undefined at k = xi = 0");
    const double q0 = xi / constants::c;
    const double kappa = std::hypot(k, q0);
    const double kappa_t = std::sqrt(k * k + eps * q0 * q0);
    return {(kappa - kappa_t) / (kappa + kappa_t), (eps * kappa - kappa_t) / (eps * kappa + kappa_t)};
}

Eigen::Matrix2d fresnel_HE(double eps, double kx, double ky, double xi) {
    if (!(xi > 0.0)) throw InputError("singular node: fresnel_HE requires xi > 0");
    const double k = std::hypot(kx, ky);
    const FresnelPair r = fresnel(eps, k, xi);
    const int e = index(Polarization::E), h = index(Polarization::H);

    Eigen::Matrix2d out = Eigen::Matrix2d::Zero();
    if (ky == 0.0) {
        out(e, e) = r.r_te;
        out(h, h) = r.r_tm;
        return out;
    }

    DiffractionChannel ch;
    ch.kx = kx;
    ch.ky = ky;
    ch.xi = xi;
    ch.kappa = std::hypot(k, xi / constants::c);
    const double q0 = xi / constants::c;

    // Columns: tangential E of the TM and TE unit vectors. TE is direction independent,
    // TM^(up/down) = -/+ (kappa / q0) k_parallel / k.
    auto te_tm = [&](double sign) {
        Eigen::Matrix2d m;
        m(0, 0) = sign * ch.kappa / q0 * kx / k;
        m(1, 0) = sign * ch.kappa / q0 * ky / k;
        m(0, 1) = -ky / k;
        m(1, 1) = kx / k;
        return m;
    };
    auto paper = [&](Direction dir) {
        Eigen::Matrix2d m;
        for (Polarization p : all_polarizations) {
            const auto t = tangential_unit_vector(ch, p, dir);
            m(0, index(p)) = t[0];
            m(1, index(p)) = t[1];
        }
        return m;
    };
    const Eigen::Matrix2d up = te_tm(-1.0), down = te_tm(1.0);
    const Eigen::Vector2d diag(r.r_tm, r.r_te);
    const Eigen::Matrix2d tangential = up * diag.asDiagonal() * down.inverse();
    return paper(Direction::up).inverse() * tangential * paper(Direction::down);
}

} // namespace cpg
