#include "cpg/geometry.hpp"

#include "cpg/errors.hpp"
#include "cpg/hash.hpp"

#include <cmath>

namespace cpg {

void GratingGeometry::validate() const {
    if (!(period > 0.0) || !std::isfinite(period)) throw InputError("grating period must be positive");
    if (!(depth >= 0.0) || !std::isfinite(depth)) throw InputError("grating depth must be non-negative");
    if (!(groove_width >= 0.0) || groove_width > period)
        throw InputError("groove width must lie in [0, period]");
}

double GratingGeometry::fold(double x) const {
    double f = std::fmod(x, period);
    if (f >= 0.5 * period) f -= period;
    if (f < -0.5 * period) f += period;
    return f;
}

double GratingGeometry::height(double x) const {
    return std::abs(fold(x)) < 0.5 * groove_width ? 0.0 : depth;
}

std::uint64_t GratingGeometry::fingerprint() const {
    return Fnv1a{}.str("lamellar").f64(period).f64(depth).f64(groove_width).digest();
}

void TruncationSpec::validate() const {
    if (n_max < 0) throw InputError("n_max must be non-negative");
    if (field() < n_max) throw InputError("n_field must be at least n_max");
}

} // namespace cpg
