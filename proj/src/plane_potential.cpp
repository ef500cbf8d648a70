#include "cpg/errors.hpp"
#include "cpg/plane_reflection.hpp"
#include "cpg/potential.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace cpg {

double plane_potential(const Polarizability& alpha, const DielectricFunction& eps, double z,
                       const QuadratureSpec& quad) {
    if (!(z > 0.0)) throw InputError("plane potential requires z > 0");
    return plane_kernels(alpha, eps, quad, z).coefficients(z).front();
}

CheckedPotential plane_potential_checked(const Polarizability& alpha, const DielectricFunction& eps, double z,
                                         const QuadratureSpec& quad) {
    if (!(z > 0.0)) throw InputError("plane potential requires z > 0");
    QuadratureSpec fixed = quad;
    fixed.xi_scale = quad.xi_scale.value_or(default_xi_scale(z));
    fixed.k_scale = quad.k_scale.value_or(default_k_scale(z));
    const double coarse = plane_potential(alpha, eps, z, fixed);
    double worst = 0.0;
    for (int axis : {0, 1}) {
        const double fine = plane_potential(alpha, eps, z, fixed.refined(axis));
        const double dev = fine == 0.0 ? std::abs(coarse) : std::abs(coarse - fine) / std::abs(fine);
        worst = std::max(worst, dev);
        if (dev > quad.tolerance) {
            std::ostringstream os;
            os.precision(6);
            os << "plane potential not converged in " << (axis == 0 ? "xi" : "k") << " at z = " << z
               << " m: relative change " << dev << " exceeds tolerance " << quad.tolerance;
            throw ConvergenceError(os.str(), coarse, fine);
        }
    }
    return {coarse, worst};
}

PfaValue pfa_potential(const Polarizability& alpha, const DielectricFunction& eps, const GratingGeometry& geom,
                       double x, double z, const QuadratureSpec& quad) {
    geom.validate();
    const double h = geom.height(x);
    const double local = z - h;
    if (!(local > 0.0)) throw InputError("atom is not above the local surface");
    return {plane_potential(alpha, eps, local, quad), local, std::abs(geom.fold(x)) < 0.5 * geom.groove_width ? PfaBranch::groove : PfaBranch::plateau};
}

} // namespace cpg
