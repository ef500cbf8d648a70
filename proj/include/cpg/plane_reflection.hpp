#pragma once

#include "cpg/geometry.hpp"
#include "cpg/materials.hpp"

#include <Eigen/Core>

namespace cpg {

struct QuadratureSpec;

/// Fresnel amplitudes of a flat vacuum / medium interface at imaginary frequency.
struct FresnelPair {
    double r_te;
    double r_tm;
};

/// r_TE = (kappa - kappa_t)/(kappa + kappa_t), r_TM = (eps kappa - kappa_t)/(eps kappa + kappa_t),
/// kappa = sqrt(k^2 + xi^2/c^2), kappa_t = sqrt(k^2 + eps xi^2/c^2).
FresnelPair fresnel(double eps, double k, double xi);

/// Flat-interface reflection in the {E, H} polarization basis, indexed [p_out][p_in] with
/// index(Polarization). Diagonal (r_TE, r_TM) when ky = 0; mixes E and H otherwise.
Eigen::Matrix2d fresnel_HE(double eps, double kx, double ky, double xi);

/// Casimir-Polder potential U0(z) of a flat surface, computed with the same node kernels and
/// reducer as the grating potential (single Rayleigh order, kx integrated over the real line).
double plane_potential(const Polarizability& alpha, const DielectricFunction& eps, double z,
                       const QuadratureSpec& quad);

/// plane_potential followed by the doubling test on the xi and k axes at fixed scales. Returns
/// the coarse value and the worst relative change; throws ConvergenceError above quad.tolerance.
struct CheckedPotential {
    double value;
    double deviation;
};

CheckedPotential plane_potential_checked(const Polarizability& alpha, const DielectricFunction& eps, double z,
                                         const QuadratureSpec& quad);

enum class PfaBranch { groove, plateau };

struct PfaValue {
    double potential;    // J
    double local_distance; // m
    PfaBranch branch;
};

/// U0(z_A - h(x_A)). Exactly on a groove edge the ridge branch is used and reported; the
/// profile itself is discontinuous there.
PfaValue pfa_potential(const Polarizability& alpha, const DielectricFunction& eps, const GratingGeometry& geom,
                       double x, double z, const QuadratureSpec& quad);

} // namespace cpg
