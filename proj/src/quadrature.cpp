#include "cpg/quadrature.hpp"

#include "cpg/errors.hpp"

#include <boost/math/special_functions/legendre.hpp>

#include <algorithm>
#include <cmath>

namespace cpg {

Rule1D gauss_legendre(int n) {
    if (n < 1) throw InputError("Gauss-Legendre rule needs at least one node");
    // Boost returns the non-negative zeros in ascending order.
    const std::vector<double> zeros = boost::math::legendre_p_zeros<double>(n);
    Rule1D r;
    auto weight = [n](double x) {
        const double dp = boost::math::legendre_p_prime(n, x);
        return 2.0 / ((1.0 - x * x) * dp * dp);
    };
    for (auto it = zeros.rbegin(); it != zeros.rend(); ++it) {
        if (*it == 0.0) continue;
        r.nodes.push_back(-*it);
        r.weights.push_back(weight(*it));
    }
    for (double x : zeros) {
        r.nodes.push_back(x);
        r.weights.push_back(weight(x));
    }
    return r;
}

void QuadratureSpec::validate() const {
    if (n_xi < 4 || n_ky < 4 || n_kx0 < 4) throw InputError("quadrature node counts must be at least 4");
    if (half_domain && n_ky % 2 != 0) throw InputError("half-domain integration needs an even ky node count");
    if (xi_scale && !(*xi_scale > 0.0)) throw InputError("xi scale must be positive");
    if (k_scale && !(*k_scale > 0.0)) throw InputError("k scale must be positive");
    if (refinement < 2) throw InputError("quadrature refinement factor must be at least 2");
    if (!(tolerance > 0.0)) throw InputError("quadrature tolerance must be positive");
}

QuadratureSpec QuadratureSpec::refined(int axis) const {
    QuadratureSpec q = *this;
    switch (axis) {
    case 0: q.n_xi *= refinement; break;
    case 1: q.n_ky *= refinement; break;
    case 2: q.n_kx0 *= refinement; break;
    default: throw InputError("quadrature axis must be 0, 1 or 2");
    }
    return q;
}

Rule1D xi_rule(int n, double xi_scale) {
    Rule1D g = gauss_legendre(n);
    Rule1D r;
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
        const double t = 0.5 * (g.nodes[i] + 1.0);
        const double one_minus = 1.0 - t;
        r.nodes.push_back(xi_scale * t / one_minus);
        r.weights.push_back(0.5 * g.weights[i] * xi_scale / (one_minus * one_minus));
    }
    return r;
}

Rule1D line_rule(int n, double k_scale) {
    Rule1D g = gauss_legendre(n);
    Rule1D r;
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
        const double u = g.nodes[i];
        const double den = 1.0 - u * u;
        r.nodes.push_back(k_scale * u / den);
        r.weights.push_back(g.weights[i] * k_scale * (1.0 + u * u) / (den * den));
    }
    return r;
}

Rule1D brillouin_rule(int n, double half_width, double k_scale, bool cluster) {
    Rule1D g = gauss_legendre(n);
    Rule1D r;
    const double beta = cluster ? std::asinh(half_width / k_scale) : 0.0;
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
        const double v = g.nodes[i];
        if (beta < 1e-3) {
            r.nodes.push_back(half_width * v);
            r.weights.push_back(half_width * g.weights[i]);
        } else {
            const double s = std::sinh(beta);
            r.nodes.push_back(half_width * std::sinh(beta * v) / s);
            r.weights.push_back(g.weights[i] * half_width * beta * std::cosh(beta * v) / s);
        }
    }
    return r;
}

} // namespace cpg
