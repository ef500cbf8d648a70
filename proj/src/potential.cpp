#include "cpg/potential.hpp"

#include "cpg/compensated_sum.hpp"
#include "cpg/constants.hpp"
#include "cpg/errors.hpp"
#include "cpg/parallel.hpp"
#include "cpg/plane_reflection.hpp"
#include "cpg/reflection_cache.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace cpg {

namespace {

constexpr double two_pi_cubed = 8.0 * constants::pi * constants::pi * constants::pi;

// hbar / (eps0 c^2) (xi^2 / 2) alpha(i xi)
double integrand_prefactor(double xi, double alpha) {
    return constants::hbar / (constants::epsilon0 * constants::c * constants::c) * 0.5 * xi * xi * alpha;
}

struct XiSample {
    double alpha;
    double eps;
};

std::vector<XiSample> sample_materials(const Polarizability& alpha, const DielectricFunction& eps, const Rule1D& xi) {
    std::vector<XiSample> out;
    out.reserve(xi.nodes.size());
    for (double x : xi.nodes) out.push_back({alpha(x), eps(x)});
    return out;
}

Rule1D ky_rule(const QuadratureSpec& quad, double k_scale) {
    Rule1D full = line_rule(quad.n_ky, k_scale);
    if (!quad.half_domain) return full;
    Rule1D half;
    for (std::size_t i = 0; i < full.nodes.size(); ++i) {
        if (full.nodes[i] > 0.0) {
            half.nodes.push_back(full.nodes[i]);
            half.weights.push_back(2.0 * full.weights[i]);
        }
    }
    return half;
}

double max_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

std::string format_z(double z) {
    std::ostringstream os;
    os.precision(6);
    os << z;
    return os.str();
}

PotentialField make_field(const KernelSet& ks, double z, bool unsafe) {
    PotentialField f;
    f.z = z;
    f.period = ks.period();
    f.n_max = ks.n_max();
    f.coefficients = ks.coefficients(z);
    f.nodes = ks.size();
    f.unsafe_region = unsafe;
    f.warnings = ks.warnings;
    const double scale = max_abs(f.coefficients);
    double res = 0.0;
    for (int m = 1; m <= f.max_order(); ++m)
        res = std::max(res, std::abs(f.coefficient(m) - f.coefficient(-m)));
    f.symmetry_residual = scale > 0.0 ? res / scale : 0.0;
    if (ks.period() > 0.0 && z > ks.reference_height()) {
        // Decay of the first Rayleigh order left out by the truncation, relative to the ridge tops.
        const double k_cut = (2 * ks.n_max() + 1) * constants::pi / ks.period();
        f.truncation_estimate = std::exp(-2.0 * k_cut * (z - ks.reference_height()));
        if (f.truncation_estimate > truncation_warning_level)
            f.warnings.push_back("n_max = " + std::to_string(ks.n_max()) + " may be too small at z_A = " + format_z(z) +
                                 " m (omitted orders decay only by " + format_z(f.truncation_estimate) + ")");
    }
    if (unsafe)
        f.warnings.push_back("UNSAFE: z_A = " + format_z(z) +
                             " m is not above the corrugation top; the Rayleigh-expansion result is not valid here");
    return f;
}

void check_region(const GratingGeometry& geom, double z, const RunOptions& opts, bool& unsafe) {
    if (!(z > 0.0)) throw InputError("atom height must be positive");
    unsafe = false;
    if (z <= geom.depth) {
        if (!opts.allow_unsafe_region)
            throw RegionError("potential formula valid only above the corrugation top (z_A = " + format_z(z) +
                              " m, a = " + format_z(geom.depth) + " m)");
        unsafe = true;
    }
}

// Worst relative change of U at the groove and plateau midpoints.
double field_deviation(const PotentialField& coarse, const PotentialField& fine, double& u_coarse, double& u_fine) {
    double worst = 0.0;
    for (double x : {0.0, 0.5 * coarse.period}) {
        const double a = evaluate(coarse, x), b = evaluate(fine, x);
        const double dev = b == 0.0 ? std::abs(a) : std::abs(a - b) / std::abs(b);
        if (dev >= worst) {
            worst = dev;
            u_coarse = a;
            u_fine = b;
        }
    }
    return worst;
}

} // namespace

double PotentialField::coefficient(int m) const {
    if (std::abs(m) > max_order()) return 0.0;
    return coefficients[static_cast<std::size_t>(m + max_order())];
}

std::vector<PolarizationOverlap> zone_overlaps(int n_max, const SpectralNode& node, double period) {
    std::vector<DiffractionChannel> ch;
    for (int j = -n_max; j <= n_max; ++j) ch.push_back(make_channel(j, node.kx0, node.ky, node.xi, period));
    std::vector<PolarizationOverlap> out;
    out.reserve(ch.size() * ch.size());
    for (const auto& a : ch)
        for (const auto& b : ch) out.push_back(polarization_overlap(a, b));
    return out;
}

NodeKernel node_kernel(const ReflectionMatrix& R, const std::vector<PolarizationOverlap>& overlaps) {
    const int zones = R.zones();
    if (overlaps.size() != static_cast<std::size_t>(zones * zones) || R.at_top().rows() != 2 * zones)
        throw std::logic_error("node_kernel: overlap table does not match the reflection matrix");
    NodeKernel k;
    k.reference_height = R.reference_height();
    k.kappa = R.kappa();
    k.K = Eigen::MatrixXd::Zero(zones, zones);
    const Eigen::MatrixXd& top = R.at_top();
    for (int a = 0; a < zones; ++a) {
        for (int b = 0; b < zones; ++b) {
            const PolarizationOverlap& o = overlaps[static_cast<std::size_t>(a * zones + b)];
            double s = 0.0;
            for (int p = 0; p < 2; ++p)
                for (int q = 0; q < 2; ++q) s += top(2 * a + p, 2 * b + q) * o.value[p][q];
            k.K(a, b) = s;
        }
    }
    return k;
}

std::vector<double> KernelSet::coefficients(double z) const {
    const int zones = 2 * n_max_ + 1;
    const int orders = 2 * (2 * n_max_) + 1;
    std::vector<CompensatedSum> acc(static_cast<std::size_t>(orders));
    std::vector<double> decay(static_cast<std::size_t>(zones));
    for (const NodeKernel& k : kernels_) {
        if (k.weight == 0.0 || k.K.size() == 0) continue;
        const double dz = z - k.reference_height;
        for (int a = 0; a < zones; ++a) decay[a] = std::exp(-k.kappa[a] * dz);
        for (int a = 0; a < zones; ++a) {
            for (int b = 0; b < zones; ++b) {
                const double term = k.weight * k.K(a, b) * decay[a] * decay[b] / k.kappa[b];
                acc[static_cast<std::size_t>(a - b + 2 * n_max_)] += term;
            }
        }
    }
    std::vector<double> out(static_cast<std::size_t>(orders));
    for (int i = 0; i < orders; ++i) out[i] = acc[i].value();
    if (half_domain) {
        // The (kx0, ky) -> (-kx0, -ky) partner of every node contributes to C_-m what the node
        // contributes to C_m; the weights were doubled, so average the mirror pair.
        std::vector<double> sym(out.size());
        for (int i = 0; i < orders; ++i) sym[i] = 0.5 * (out[i] + out[orders - 1 - i]);
        out = std::move(sym);
    }
    return out;
}

double default_xi_scale(double distance) { return constants::c / distance; }
double default_k_scale(double distance) { return 1.0 / distance; }

std::vector<QuadratureNode> grating_nodes(const QuadratureSpec& quad, double period, double xi_scale, double k_scale) {
    quad.validate();
    const Rule1D xi = xi_rule(quad.n_xi, xi_scale);
    const Rule1D ky = ky_rule(quad, k_scale);
    const Rule1D kx0 = brillouin_rule(quad.n_kx0, constants::pi / period, k_scale, quad.cluster_kx0);
    std::vector<QuadratureNode> out;
    out.reserve(xi.nodes.size() * ky.nodes.size() * kx0.nodes.size());
    for (std::size_t a = 0; a < xi.nodes.size(); ++a)
        for (std::size_t b = 0; b < ky.nodes.size(); ++b)
            for (std::size_t c = 0; c < kx0.nodes.size(); ++c)
                out.push_back({{kx0.nodes[c], ky.nodes[b], xi.nodes[a]},
                               xi.weights[a] * ky.weights[b] * kx0.weights[c] / two_pi_cubed,
                               static_cast<int>(a)});
    return out;
}

KernelSet grating_kernels(const PotentialProblem& problem, double distance, const RunOptions& opts) {
    const auto& geom = problem.geom;
    geom.validate();
    problem.trunc.validate();
    if (!(distance > 0.0)) throw InputError("reference distance for the quadrature scales must be positive");
    const double xi_scale = problem.quad.xi_scale.value_or(default_xi_scale(distance));
    const double k_scale = problem.quad.k_scale.value_or(default_k_scale(distance));
    const std::vector<QuadratureNode> nodes = grating_nodes(problem.quad, geom.period, xi_scale, k_scale);
    const std::vector<XiSample> mat =
        sample_materials(problem.alpha, problem.eps, xi_rule(problem.quad.n_xi, xi_scale));

    const int n = problem.trunc.n_max;
    std::vector<NodeKernel> kernels(nodes.size());
    std::vector<std::string> node_warnings(nodes.size());

    parallel_for(nodes.size(), opts.workers, [&](std::size_t i) {
        const QuadratureNode& qn = nodes[i];
        const XiSample& m = mat[static_cast<std::size_t>(qn.xi_index)];
        NodeKernel& k = kernels[i];
        k.weight = qn.weight * integrand_prefactor(qn.node.xi, m.alpha);
        k.reference_height = geom.depth;
        if (m.alpha == 0.0 || m.eps == 1.0) {
            k.weight = 0.0;
            return;
        }
        std::optional<ReflectionMatrix> R;
        std::uint64_t key = 0;
        if (opts.cache) {
            key = reflection_key(geom, m.eps, problem.trunc, qn.node);
            R = opts.cache->find(key);
        }
        if (!R) {
            R = reflection_matrix(geom, m.eps, problem.trunc, qn.node);
            if (opts.cache) opts.cache->insert(key, *R);
        }
        const double w = k.weight;
        k = node_kernel(*R, zone_overlaps(n, qn.node, geom.period));
        k.weight = w;
        if (!R->warning.empty()) node_warnings[i] = R->warning;
    });

    KernelSet ks(n, geom.period, std::move(kernels));
    ks.half_domain = problem.quad.half_domain;
    std::size_t ill = 0;
    std::string first;
    for (auto& w : node_warnings) {
        if (w.empty()) continue;
        if (ill++ == 0) first = w;
    }
    if (ill > 0) ks.warnings.push_back(std::to_string(ill) + " ill-conditioned node(s), first: " + first);
    return ks;
}

KernelSet plane_kernels(const Polarizability& alpha, const DielectricFunction& eps, const QuadratureSpec& quad,
                        double distance, const RunOptions& opts) {
    quad.validate();
    if (!(distance > 0.0)) throw InputError("reference distance for the quadrature scales must be positive");
    const double xi_scale = quad.xi_scale.value_or(default_xi_scale(distance));
    const double k_scale = quad.k_scale.value_or(default_k_scale(distance));
    const Rule1D xi = xi_rule(quad.n_xi, xi_scale);
    const Rule1D ky = ky_rule(quad, k_scale);
    const Rule1D kx = line_rule(quad.n_ky, k_scale);
    const std::vector<XiSample> mat = sample_materials(alpha, eps, xi);

    const std::size_t per_xi = ky.nodes.size() * kx.nodes.size();
    std::vector<NodeKernel> kernels(xi.nodes.size() * per_xi);
    parallel_for(kernels.size(), opts.workers, [&](std::size_t i) {
        const std::size_t a = i / per_xi;
        const std::size_t b = (i % per_xi) / kx.nodes.size();
        const std::size_t c = i % kx.nodes.size();
        const XiSample& m = mat[a];
        const double weight =
            xi.weights[a] * ky.weights[b] * kx.weights[c] / two_pi_cubed * integrand_prefactor(xi.nodes[a], m.alpha);
        if (m.alpha == 0.0 || m.eps == 1.0) return;

        DiffractionChannel ch;
        ch.kx = kx.nodes[c];
        ch.kx0 = ch.kx;
        ch.ky = ky.nodes[b];
        ch.xi = xi.nodes[a];
        ch.kappa = std::hypot(ch.kx, ch.ky, ch.xi / constants::c);
        const SpectralNode node{ch.kx, ch.ky, ch.xi};
        ReflectionMatrix R(0, node, 0.0, fresnel_HE(m.eps, ch.kx, ch.ky, ch.xi), {ch.kappa});
        NodeKernel& k = kernels[i];
        k = node_kernel(R, {polarization_overlap(ch, ch)});
        k.weight = weight;
    });
    KernelSet ks(0, 0.0, std::move(kernels));
    ks.half_domain = quad.half_domain;
    return ks;
}

namespace {

std::vector<PotentialField> scan_band(const PotentialProblem& problem, const std::vector<double>& zs,
                                     const std::vector<bool>& unsafe, const RunOptions& opts) {
    const double z_min = *std::min_element(zs.begin(), zs.end());
    // The corrugation top is the nearest surface; in the unsafe region fall back to z itself.
    const double distance = z_min > problem.geom.depth ? z_min - problem.geom.depth : z_min;

    const KernelSet ks = grating_kernels(problem, distance, opts);
    std::vector<PotentialField> out;
    out.reserve(zs.size());
    for (std::size_t i = 0; i < zs.size(); ++i) out.push_back(make_field(ks, zs[i], unsafe[i]));

    if (opts.check_quadrature) {
        // Scales stay fixed so that only the node count changes.
        PotentialProblem fixed = problem;
        fixed.quad.xi_scale = problem.quad.xi_scale.value_or(default_xi_scale(distance));
        fixed.quad.k_scale = problem.quad.k_scale.value_or(default_k_scale(distance));
        static const char* axis_name[] = {"xi", "ky", "kx0"};
        for (int axis = 0; axis < 3; ++axis) {
            PotentialProblem refined = fixed;
            refined.quad = fixed.quad.refined(axis);
            const KernelSet fine = grating_kernels(refined, distance, opts);
            for (std::size_t i = 0; i < zs.size(); ++i) {
                const PotentialField ff = make_field(fine, zs[i], unsafe[i]);
                double uc = 0.0, uf = 0.0;
                const double dev = field_deviation(out[i], ff, uc, uf);
                out[i].quadrature_deviation = std::max(out[i].quadrature_deviation, dev);
                if (dev > problem.quad.tolerance) {
                    std::ostringstream os;
                    os.precision(6);
                    os << "quadrature not converged in " << axis_name[axis] << " at z_A = " << zs[i]
                       << " m: relative change " << dev << " exceeds tolerance " << problem.quad.tolerance
                       << " (coarse " << uc << " J, refined " << uf << " J)";
                    throw ConvergenceError(os.str(), uc, uf);
                }
            }
        }
    }
    return out;
}

} // namespace

std::vector<PotentialField> fourier_coefficients_scan(const PotentialProblem& problem, const std::vector<double>& zs,
                                                      const RunOptions& opts) {
    if (zs.empty()) return {};
    if (!(opts.band_ratio >= 1.0)) throw InputError("scan band ratio must be at least 1");
    std::vector<bool> unsafe(zs.size());
    for (std::size_t i = 0; i < zs.size(); ++i) {
        bool u = false;
        check_region(problem.geom, zs[i], opts, u);
        unsafe[i] = u;
    }
    const double a = problem.geom.depth;
    auto distance = [a](double z) { return z > a ? z - a : z; };

    std::vector<std::size_t> order(zs.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t l, std::size_t r) { return distance(zs[l]) < distance(zs[r]); });

    std::vector<PotentialField> out(zs.size());
    std::size_t begin = 0;
    while (begin < order.size()) {
        const double limit = opts.band_ratio * distance(zs[order[begin]]);
        std::size_t end = begin;
        std::vector<double> band_z;
        std::vector<bool> band_unsafe;
        while (end < order.size() && distance(zs[order[end]]) <= limit) {
            band_z.push_back(zs[order[end]]);
            band_unsafe.push_back(unsafe[order[end]]);
            ++end;
        }
        std::vector<PotentialField> fields = scan_band(problem, band_z, band_unsafe, opts);
        for (std::size_t k = 0; k < fields.size(); ++k) out[order[begin + k]] = std::move(fields[k]);
        begin = end;
    }
    return out;
}

PotentialField fourier_coefficients(const PotentialProblem& problem, double z, const RunOptions& opts) {
    return fourier_coefficients_scan(problem, {z}, opts).front();
}

PotentialField fourier_coefficients(const Polarizability& alpha, const DielectricFunction& eps,
                                    const GratingGeometry& geom, const TruncationSpec& trunc,
                                    const QuadratureSpec& quad, double z) {
    return fourier_coefficients(PotentialProblem{alpha, eps, geom, trunc, quad}, z);
}

double evaluate(const PotentialField& field, double x) {
    CompensatedSum u;
    u += field.coefficient(0);
    for (int m = 1; m <= field.max_order(); ++m)
        u += (field.coefficient(m) + field.coefficient(-m)) * std::cos(2.0 * constants::pi * m * x / field.period);
    return u.value();
}

double curvature(const PotentialField& field, double x) {
    CompensatedSum u;
    for (int m = 1; m <= field.max_order(); ++m) {
        const double g = 2.0 * constants::pi * m / field.period;
        u += -g * g * (field.coefficient(m) + field.coefficient(-m)) * std::cos(g * x);
    }
    return u.value();
}

ConvergenceTable converge_nmax(const PotentialProblem& problem, double z, const std::vector<int>& n_list,
                               const std::vector<double>& xs, const RunOptions& opts) {
    if (n_list.empty()) throw InputError("n_max list is empty");
    for (std::size_t i = 1; i < n_list.size(); ++i)
        if (n_list[i] < n_list[i - 1]) throw InputError("n_max list must be non-decreasing");
    if (xs.empty()) throw InputError("convergence table needs at least one x_A sample");

    std::vector<PotentialField> fields;
    for (int n : n_list) {
        PotentialProblem p = problem;
        p.trunc.n_max = n;
        if (problem.trunc.n_field >= 0) p.trunc.n_field = n + (problem.trunc.n_field - problem.trunc.n_max);
        fields.push_back(fourier_coefficients(p, z, opts));
    }
    ConvergenceTable t;
    t.n_list = n_list;
    t.z = z;
    for (double x : xs) {
        ConvergenceRow row;
        row.x = x;
        for (const auto& f : fields) row.values.push_back(evaluate(f, x));
        const double ref = row.values.back();
        for (double v : row.values) row.deviations.push_back(ref == 0.0 ? std::abs(v) : std::abs(v - ref) / std::abs(ref));
        t.rows.push_back(std::move(row));
    }
    return t;
}

} // namespace cpg
