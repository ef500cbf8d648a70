#pragma once

#include <optional>
#include <vector>

namespace cpg {

/// Gauss-Legendre rule on [-1, 1], nodes ascending.
struct Rule1D {
    std::vector<double> nodes;
    std::vector<double> weights;
};

Rule1D gauss_legendre(int n);

/// Node counts and scales of the tensor-product rule used for the (xi, ky, kx0) integrals.
///
///   xi  = xi_scale t / (1 - t),     t in (0, 1)      Gauss-Legendre, never touches xi = 0
///   ky  = k_scale u / (1 - u^2),     u in (-1, 1)     Gauss-Legendre
///   kx0 = L sinh(beta v) / sinh(beta), v in [-1, 1]   Gauss-Legendre on the zone L = pi/d,
///         beta = asinh(L / k_scale) clusters nodes around kx0 = 0 when L >> k_scale
///
/// Unset scales default to c / z_ref and 1 / z_ref for the smallest distance of a scan.
struct QuadratureSpec {
    int n_xi = 40;
    int n_ky = 40;
    int n_kx0 = 16;
    std::optional<double> xi_scale; // rad/s
    std::optional<double> k_scale;  // rad/m
    bool cluster_kx0 = true;
    bool half_domain = false; // integrate ky > 0 only, fold in the (kx0, ky) -> (-kx0, -ky) partner
    int refinement = 2;       // node multiplier of the doubling test
    double tolerance = 5e-3;  // relative change allowed by the doubling test

    void validate() const;

    /// Copy with one axis multiplied by `refinement`. axis: 0 = xi, 1 = ky, 2 = kx0.
    QuadratureSpec refined(int axis) const;
};

/// Mapped 1-D rule: abscissae and weights including the Jacobian.
Rule1D xi_rule(int n, double xi_scale);
Rule1D line_rule(int n, double k_scale);
Rule1D brillouin_rule(int n, double half_width, double k_scale, bool cluster);

} // namespace cpg
