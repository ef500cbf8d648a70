#pragma once

#include "cpg/channels.hpp"
#include "cpg/geometry.hpp"
#include "cpg/materials.hpp"

#include <Eigen/Core>

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

namespace cpg {

enum class FourierOf { permittivity, inverse_permittivity };

/// m-th Fourier coefficient of eps(x) (or 1/eps(x)) over one period, grooves of vacuum
/// centred on x = 0:
///   m = 0:  (s + eps (d - s)) / d
///   m != 0: (1 - eps) (s/d) sin(pi m s/d) / (pi m s/d)
double eps_fourier(const GratingGeometry& geom, double eps_mat, int m, FourierOf what = FourierOf::permittivity);

/// Quadrature node on which a reflection operator is evaluated.
struct SpectralNode {
    double kx0; // rad/m
    double ky;  // rad/m
    double xi;  // rad/s
};

/// Grating reflection operator <j, p | R | j', p'> at one (kx0, ky, i xi), over the Rayleigh
/// orders |j| <= n_max and polarizations {E, H}. Composite index 2 (j + n_max) + index(p).
///
/// The amplitudes are stored referenced to the ridge tops z = a, where every entry is bounded.
/// Referencing to a plane z0 multiplies entry (j, j') by exp((kappa_j + kappa_j') (a - z0));
/// z0 = 0 (groove bottom) is the convention of the potential formula and of at().
class ReflectionMatrix {
public:
    ReflectionMatrix() = default;
    ReflectionMatrix(int n_max, SpectralNode node, double reference_height, Eigen::MatrixXd top,
                     std::vector<double> kappa);

    int n_max() const noexcept { return n_max_; }
    int zones() const noexcept { return 2 * n_max_ + 1; }
    int size() const noexcept { return 2 * zones(); }
    const SpectralNode& node() const noexcept { return node_; }
    double reference_height() const noexcept { return reference_height_; }

    static int composite(int j, Polarization p, int n_max) noexcept { return 2 * (j + n_max) + index(p); }

    /// Entry referenced to the groove bottom z = 0.
    double at(int j, Polarization p, int jp, Polarization pp) const;

    /// Whole matrix referenced to z = a (ridge tops).
    const Eigen::MatrixXd& at_top() const noexcept { return top_; }

    /// Whole matrix referenced to the plane z = z0. Overflows for z0 far below a at large kappa.
    Eigen::MatrixXd referenced_to(double z0) const;

    /// kappa_j for j = -n_max..n_max.
    const std::vector<double>& kappa() const noexcept { return kappa_; }
    double kappa(int j) const { return kappa_.at(static_cast<std::size_t>(j + n_max_)); }

    /// Reciprocal condition estimate of the final matching system.
    double rcond = 1.0;
    std::string warning;
    std::uint64_t geometry_id = 0;
    double eps_value = 1.0;

private:
    int n_max_ = 0;
    SpectralNode node_{};
    double reference_height_ = 0.0;
    Eigen::MatrixXd top_;
    std::vector<double> kappa_;
};

/// Matching systems with a reciprocal condition number below this get a warning attached.
inline constexpr double ill_conditioned_rcond = 1e-13;

/// Fourier modal solution of the lamellar grating at imaginary frequency.
///
/// The layer 0 <= z <= a is homogeneous in z, so the coupled-mode equations for the harmonics
/// of the tangential fields have constant coefficients and are solved exactly by
/// eigendecomposition. On the imaginary axis they split into two real symmetric problems:
/// modes with E_x = 0 from (Kx^2 + ky^2 + q0^2 [eps]) and modes with H_x = 0 from the
/// generalized problem (Kx [eps]^-1 Kx + q0^2) v = mu [1/eps] v, with [.] a Toeplitz matrix
/// of Fourier coefficients (inverse rule for the normal component E_x). Layer propagation only
/// ever enters through exp(-q a) with q > 0.
///
/// Throws SolverError (with the node in the message) if an eigendecomposition fails and
/// InputError on invalid arguments.
ReflectionMatrix reflection_matrix(const GratingGeometry& geom, double eps_value, const TruncationSpec& trunc,
                                   const SpectralNode& node);

ReflectionMatrix reflection_matrix(const GratingGeometry& geom, const DielectricFunction& eps,
                                   const TruncationSpec& trunc, const SpectralNode& node);

/// Same solver in complex arithmetic with the groove centre moved to x = origin_offset. Returns
/// the matrix referenced to z = a in the composite index. With origin_offset = 0 the imaginary
/// parts vanish to rounding; a shift multiplies entry (j, j') by exp(-2 pi i (j - j') offset / d).
Eigen::MatrixXcd reflection_matrix_shifted(const GratingGeometry& geom, double eps_value, const TruncationSpec& trunc,
                                           const SpectralNode& node, double origin_offset);

} // namespace cpg
