#include "cpg/analysis.hpp"

#include "cpg/constants.hpp"
#include "cpg/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace cpg {

RhoPoint rho(const PotentialField& field, const PlaneReference& plane, const GratingGeometry& geom, double x) {
    geom.validate();
    RhoPoint r;
    r.x = x;
    r.z = field.z;
    r.U = evaluate(field, x);

    const double offset = std::abs(geom.fold(x));
    const double edge = 0.5 * geom.groove_width;
    const bool on_edge = std::abs(offset - edge) <= 1e-12 * geom.period && geom.groove_width > 0.0 &&
                         geom.groove_width < geom.period;
    if (on_edge && geom.depth > 0.0) {
        const double groove = r.U / plane(field.z);
        const double plateau = field.z > geom.depth ? r.U / plane(field.z - geom.depth) : NAN;
        std::ostringstream os;
        os.precision(8);
        os << "x_A = " << x << " m lies on a groove edge; PFA branch is ambiguous (groove rho = " << groove
           << ", plateau rho = " << plateau << ")";
        throw AmbiguityError(os.str(), groove, plateau);
    }
    r.branch = offset < edge ? PfaBranch::groove : PfaBranch::plateau;
    const double local = field.z - (r.branch == PfaBranch::groove ? 0.0 : geom.depth);
    if (!(local > 0.0)) throw InputError("atom is not above the local surface");
    r.U_ref = plane(local);
    r.rho = r.U / r.U_ref;
    return r;
}

double aperture_angle(const GratingGeometry& geom, double z) {
    if (!(z > geom.depth)) throw InputError("aperture angle requires z_A above the ridge tops");
    return 2.0 * std::atan(geom.period / (4.0 * (z - geom.depth))) * 180.0 / constants::pi;
}

double SineFit::operator()(double x, double period) const {
    return mean - amplitude * std::cos(2.0 * constants::pi * x / period);
}

SineFit sine_fit(const PotentialField& field, const std::vector<double>& xs) {
    if (xs.empty()) throw InputError("sine fit needs a non-empty x grid");
    SineFit f;
    const double u0 = evaluate(field, 0.0);
    const double uh = evaluate(field, 0.5 * field.period);
    f.mean = 0.5 * (u0 + uh);
    f.amplitude = 0.5 * (uh - u0);
    if (f.amplitude == 0.0) return f;
    double worst = 0.0;
    for (double x : xs) worst = std::max(worst, std::abs(f(x, field.period) - evaluate(field, x)));
    f.residual = worst / std::abs(f.amplitude);
    return f;
}

SineFit sine_fit(const PotentialField& field, int points) {
    if (points < 2) throw InputError("sine fit needs at least two grid points");
    std::vector<double> xs;
    for (int i = 0; i < points; ++i) xs.push_back(field.period * i / points);
    return sine_fit(field, xs);
}

double stiffness(const PotentialField& field, double x) { return curvature(field, x); }

double spatial_average(const PotentialField& field) { return field.coefficient(0); }

} // namespace cpg
