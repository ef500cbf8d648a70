#pragma once

#include "cpg/channels.hpp"
#include "cpg/geometry.hpp"
#include "cpg/grating_reflection.hpp"
#include "cpg/materials.hpp"
#include "cpg/quadrature.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <string>
#include <vector>

namespace cpg {

class ReflectionCache;

/// Contraction of one reflection matrix with the polarization overlaps, plus what is needed
/// to move it to any atom height:
///   K[j][j'] = sum_{p,p'} R[(j,p),(j',p')] O[p][p'],   R referenced at z = reference_height.
struct NodeKernel {
    double weight = 0.0;           // quadrature weight times every factor of the integrand except K
    double reference_height = 0.0; // m
    std::vector<double> kappa;     // per zone, j = -n_max..n_max
    Eigen::MatrixXd K;

    int n_max() const noexcept { return static_cast<int>(kappa.size() / 2); }
};

/// Overlaps O(j, j') of all zone pairs of a Bloch family, row-major over (j + n, j' + n).
std::vector<PolarizationOverlap> zone_overlaps(int n_max, const SpectralNode& node, double period);

/// Throws std::logic_error if the overlap table does not match the matrix.
NodeKernel node_kernel(const ReflectionMatrix& R, const std::vector<PolarizationOverlap>& overlaps);

/// Everything that the potential needs from one quadrature pass. Evaluating C_m at a new
/// height is a cheap reduction over the stored kernels.
class KernelSet {
public:
    KernelSet() = default;
    KernelSet(int n_max, double period, std::vector<NodeKernel> kernels)
        : n_max_(n_max), period_(period), kernels_(std::move(kernels)) {}

    int n_max() const noexcept { return n_max_; }
    double period() const noexcept { return period_; }
    std::size_t size() const noexcept { return kernels_.size(); }
    const std::vector<NodeKernel>& kernels() const noexcept { return kernels_; }

    /// C_m(z) for m = -2 n_max..2 n_max (index m + 2 n_max), folded in node order with
    /// compensated summation.
    std::vector<double> coefficients(double z) const;

    std::vector<std::string> warnings;
    bool half_domain = false;

    /// Height all kernels are referenced to (the ridge tops for a grating, 0 for a plane).
    double reference_height() const noexcept { return kernels_.empty() ? 0.0 : kernels_.front().reference_height; }

private:
    int n_max_ = 0;
    double period_ = 0.0;
    std::vector<NodeKernel> kernels_;
};

struct PotentialProblem {
    Polarizability alpha;
    DielectricFunction eps;
    GratingGeometry geom;
    TruncationSpec trunc;
    QuadratureSpec quad;
};

struct RunOptions {
    int workers = 1;
    ReflectionCache* cache = nullptr;
    bool allow_unsafe_region = false; // evaluate at z_A <= a anyway, flagged
    bool check_quadrature = false;    // run the doubling test and throw ConvergenceError on failure
    double band_ratio = 4.0;          // heights sharing one kernel pass lie within this distance ratio
};

/// Fields whose first omitted Rayleigh order decays less than this get a warning.
inline constexpr double truncation_warning_level = 1e-3;

/// Lateral Fourier series of U(x_A, z_A) at one height.
struct PotentialField {
    double z = 0.0;      // m
    double period = 0.0; // m
    int n_max = 0;
    std::vector<double> coefficients; // C_m, index m + 2 n_max, J

    double symmetry_residual = 0.0;    // max |C_m - C_-m| / max |C_m|
    double quadrature_deviation = -1.0; // worst relative change under doubling, < 0 if not run
    double truncation_estimate = 0.0;   // exp(-2 k_cut (z_A - a)), k_cut = (2 n_max + 1) pi / d
    bool unsafe_region = false;
    std::size_t nodes = 0;
    std::vector<std::string> warnings;

    int max_order() const noexcept { return 2 * n_max; }
    double coefficient(int m) const;
};

/// Spectral nodes and weights of the tensor-product rule, in reduction order (xi outer,
/// then ky, then kx0).
struct QuadratureNode {
    SpectralNode node;
    double weight; // includes the 1/(2 pi)^3 measure
    int xi_index;
};

std::vector<QuadratureNode> grating_nodes(const QuadratureSpec& quad, double period, double xi_scale, double k_scale);

/// Default scales for atoms no closer than `distance` to the nearest surface.
double default_xi_scale(double distance);
double default_k_scale(double distance);

KernelSet grating_kernels(const PotentialProblem& problem, double distance, const RunOptions& opts = {});

/// Single-zone kernels of a flat interface at z = 0, kx integrated over the real line.
KernelSet plane_kernels(const Polarizability& alpha, const DielectricFunction& eps, const QuadratureSpec& quad,
                        double distance, const RunOptions& opts = {});

PotentialField fourier_coefficients(const PotentialProblem& problem, double z, const RunOptions& opts = {});

PotentialField fourier_coefficients(const Polarizability& alpha, const DielectricFunction& eps,
                                    const GratingGeometry& geom, const TruncationSpec& trunc,
                                    const QuadratureSpec& quad, double z);

/// Heights are grouped into bands whose distances to the ridge tops lie within opts.band_ratio
/// of each other; each band shares one kernel pass with scales set by its smallest height.
/// Results are returned in input order.
std::vector<PotentialField> fourier_coefficients_scan(const PotentialProblem& problem, const std::vector<double>& zs,
                                                      const RunOptions& opts = {});

/// U(x_A) = C_0 + sum_{m>0} (C_m + C_-m) cos(2 pi m x_A / d).
double evaluate(const PotentialField& field, double x);

/// d^2 U / d x_A^2 from the series.
double curvature(const PotentialField& field, double x);

struct ConvergenceRow {
    double x;
    std::vector<double> values;     // U per n_max in n_list
    std::vector<double> deviations; // |U(n) - U(n_last)| / |U(n_last)|
};

struct ConvergenceTable {
    std::vector<int> n_list;
    double z = 0.0;
    std::vector<ConvergenceRow> rows;
};

ConvergenceTable converge_nmax(const PotentialProblem& problem, double z, const std::vector<int>& n_list,
                               const std::vector<double>& xs, const RunOptions& opts = {});

} // namespace cpg
