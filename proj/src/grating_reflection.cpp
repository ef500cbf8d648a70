#include "cpg/grating_reflection.hpp"

#include "cpg/constants.hpp"
#include "cpg/errors.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <sstream>

namespace cpg {

double eps_fourier(const GratingGeometry& geom, double eps_mat, int m, FourierOf what) {
    const double ridge = what == FourierOf::permittivity ? eps_mat : 1.0 / eps_mat;
    const double fill = geom.groove_width / geom.period;
    if (m == 0) return fill + ridge * (1.0 - fill);
    const double arg = constants::pi * m * fill;
    if (arg == 0.0) return 0.0;
    return (1.0 - ridge) * fill * std::sin(arg) / arg;
}

ReflectionMatrix::ReflectionMatrix(int n_max, SpectralNode node, double reference_height, Eigen::MatrixXd top,
                                   std::vector<double> kappa)
    : n_max_(n_max), node_(node), reference_height_(reference_height), top_(std::move(top)), kappa_(std::move(kappa)) {}

double ReflectionMatrix::at(int j, Polarization p, int jp, Polarization pp) const {
    const double shift = (kappa(j) + kappa(jp)) * reference_height_;
    return std::exp(shift) * top_(composite(j, p, n_max_), composite(jp, pp, n_max_));
}

Eigen::MatrixXd ReflectionMatrix::referenced_to(double z0) const {
    Eigen::MatrixXd out = top_;
    const double dz = reference_height_ - z0;
    for (int r = 0; r < size(); ++r)
        for (int c = 0; c < size(); ++c) out(r, c) *= std::exp((kappa_[r / 2] + kappa_[c / 2]) * dz);
    return out;
}

namespace {

std::string describe(const SpectralNode& n) {
    std::ostringstream os;
    os.precision(17);
    os << "(kx0=" << n.kx0 << ", ky=" << n.ky << ", xi=" << n.xi << ")";
    return os.str();
}

template <class Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

// Tangential field content of the 2N modes of one region. Rows 0..N-1 hold x components of the
// N harmonics, rows N..2N-1 the y components. A mode with profile exp(+q z) has (E, H) = (W, V)
// columns; exp(-q z) has (W, -V).
template <class Scalar>
struct Modes {
    Mat<Scalar> W;
    Mat<Scalar> V;
    Eigen::VectorXd q;
};

struct Kinematics {
    int n_field;
    int size; // N
    Eigen::VectorXd kx;
    double ky;
    double q0;
};

// Homogeneous region: analytic modes per harmonic. Column i is the E_x = 0 mode, column N + i
// the H_x = 0 mode of harmonic i.
template <class Scalar>
Modes<Scalar> uniform_modes(const Kinematics& k, double eps) {
    const int N = k.size;
    Modes<Scalar> m;
    m.W = Mat<Scalar>::Zero(2 * N, 2 * N);
    m.V = Mat<Scalar>::Zero(2 * N, 2 * N);
    m.q.resize(2 * N);
    for (int i = 0; i < N; ++i) {
        const double kx = k.kx[i];
        const double mu = kx * kx + eps * k.q0 * k.q0;
        const double kappa = std::sqrt(mu + k.ky * k.ky);
        m.q[i] = m.q[N + i] = kappa;
        m.W(N + i, i) = k.q0;
        m.V(i, i) = mu / kappa;
        m.V(N + i, i) = k.ky * kx / kappa;
        m.W(i, N + i) = -mu / (eps * kappa);
        m.W(N + i, N + i) = -k.ky * kx / (eps * kappa);
        m.V(N + i, N + i) = k.q0;
    }
    return m;
}

template <class Scalar>
Modes<Scalar> layer_modes(const Kinematics& k, const Mat<Scalar>& eps_toeplitz, const Mat<Scalar>& inv_toeplitz,
                          const SpectralNode& node) {
    const int N = k.size;
    const Eigen::VectorXd kx2 = k.kx.array().square();

    // E_x = 0 family.
    Mat<Scalar> omega_t = k.q0 * k.q0 * eps_toeplitz;
    omega_t.diagonal().array() += (kx2.array() + k.ky * k.ky).template cast<Scalar>();
    Eigen::SelfAdjointEigenSolver<Mat<Scalar>> te(omega_t);
    if (te.info() != Eigen::Success) throw SolverError("E_x = 0 mode eigensolver failed at node " + describe(node));

    // H_x = 0 family: (Kx [eps]^-1 Kx + q0^2) v = mu [1/eps] v.
    Eigen::LLT<Mat<Scalar>> eps_llt(eps_toeplitz);
    if (eps_llt.info() != Eigen::Success) throw SolverError("permittivity Toeplitz matrix not positive definite at node " + describe(node));
    const Mat<Scalar> kx_diag = k.kx.template cast<Scalar>().asDiagonal();
    const Mat<Scalar> eps_inv_kx = eps_llt.solve(kx_diag);
    Mat<Scalar> a = kx_diag * eps_inv_kx;
    a = (0.5 * (a + a.adjoint())).eval();
    a.diagonal().array() += Scalar(k.q0 * k.q0);
    Eigen::GeneralizedSelfAdjointEigenSolver<Mat<Scalar>> tm(a, inv_toeplitz);
    if (tm.info() != Eigen::Success) throw SolverError("H_x = 0 mode eigensolver failed at node " + describe(node));

    Modes<Scalar> m;
    m.W = Mat<Scalar>::Zero(2 * N, 2 * N);
    m.V = Mat<Scalar>::Zero(2 * N, 2 * N);
    m.q.resize(2 * N);

    const Eigen::VectorXd lam_t = te.eigenvalues();
    const Mat<Scalar>& u = te.eigenvectors();
    for (int c = 0; c < N; ++c) {
        if (!(lam_t[c] > 0.0)) throw SolverError("non-positive layer eigenvalue at node " + describe(node));
        const double q = std::sqrt(lam_t[c]);
        m.q[c] = q;
        m.W.block(N, c, N, 1) = k.q0 * u.col(c);
        m.V.block(0, c, N, 1) = ((lam_t[c] - k.ky * k.ky) / q) * u.col(c);
        m.V.block(N, c, N, 1) = (k.ky / q) * (kx_diag * u.col(c));
    }

    const Eigen::VectorXd mu = tm.eigenvalues();
    const Mat<Scalar>& v = tm.eigenvectors();
    const Mat<Scalar> pv = inv_toeplitz * v;
    const Mat<Scalar> eps_inv_kx_v = eps_inv_kx * v;
    for (int c = 0; c < N; ++c) {
        const double lam = mu[c] + k.ky * k.ky;
        if (!(mu[c] > 0.0)) throw SolverError("non-positive layer eigenvalue at node " + describe(node));
        const double q = std::sqrt(lam);
        m.q[N + c] = q;
        m.W.block(0, N + c, N, 1) = (-mu[c] / q) * pv.col(c);
        m.W.block(N, N + c, N, 1) = (-k.ky / q) * eps_inv_kx_v.col(c);
        m.V.block(N, N + c, N, 1) = k.q0 * v.col(c);
    }
    return m;
}

template <class Scalar>
Scalar fourier_phase(int m, double origin_offset, double period);

template <>
double fourier_phase<double>(int, double, double) {
    return 1.0;
}

template <>
std::complex<double> fourier_phase<std::complex<double>>(int m, double origin_offset, double period) {
    return std::polar(1.0, -2.0 * constants::pi * m * origin_offset / period);
}

// Reflection matrix in the full harmonic range, composite index 2 i + index(p) with
// i = n + n_field, referenced to z = a.
template <class Scalar>
Mat<Scalar> solve_grating(const GratingGeometry& geom, double eps_value, int n_field, const SpectralNode& node,
                          double origin_offset, double* rcond_out) {
    const int N = 2 * n_field + 1;
    Kinematics k;
    k.n_field = n_field;
    k.size = N;
    k.kx.resize(N);
    for (int i = 0; i < N; ++i) k.kx[i] = node.kx0 + 2.0 * constants::pi * (i - n_field) / geom.period;
    k.ky = node.ky;
    k.q0 = node.xi / constants::c;

    Mat<Scalar> eps_t(N, N), inv_t(N, N);
    for (int r = 0; r < N; ++r) {
        for (int c = 0; c < N; ++c) {
            const int m = r - c;
            const Scalar phase = fourier_phase<Scalar>(m, origin_offset, geom.period);
            eps_t(r, c) = phase * eps_fourier(geom, eps_value, m, FourierOf::permittivity);
            inv_t(r, c) = phase * eps_fourier(geom, eps_value, m, FourierOf::inverse_permittivity);
        }
    }

    const Modes<Scalar> vac = uniform_modes<Scalar>(k, 1.0);
    const Modes<Scalar> sub = uniform_modes<Scalar>(k, eps_value);
    const Modes<Scalar> lay = layer_modes<Scalar>(k, eps_t, inv_t, node);
    const int M = 2 * N;

    // Groove bottom: layer modes decaying upward (c_u) and downward (c_d) against the
    // transmitted substrate field; c_u = rho X c_d.
    const Mat<Scalar> sub_admittance =
        sub.W.transpose().partialPivLu().solve(sub.V.transpose()).transpose(); // V_s W_s^-1
    const Mat<Scalar> ysw = sub_admittance * lay.W;
    const Mat<Scalar> rho = (lay.V + ysw).partialPivLu().solve(lay.V - ysw);

    Eigen::VectorXd decay(M);
    for (int i = 0; i < M; ++i) decay[i] = std::exp(-lay.q[i] * geom.depth);
    const Mat<Scalar> s = decay.asDiagonal() * rho * decay.asDiagonal();

    // Ridge tops: match to the vacuum field exp(kappa (z - a)) a + exp(-kappa (z - a)) b.
    Mat<Scalar> ps = s;
    ps.diagonal().array() += Scalar(1.0);
    Mat<Scalar> ms = -s;
    ms.diagonal().array() += Scalar(1.0);
    const Mat<Scalar> f = vac.W.partialPivLu().solve(lay.W * ps);
    const Mat<Scalar> g = vac.V.partialPivLu().solve(lay.V * ms);

    const Mat<Scalar> sum = f + g;
    const Eigen::PartialPivLU<Mat<Scalar>> lu(sum.transpose());
    if (rcond_out) *rcond_out = lu.rcond();
    const Mat<Scalar> r_family = lu.solve((f - g).transpose()).transpose(); // (F - G)(F + G)^-1

    // Family amplitudes -> {E, H} amplitudes of the Rayleigh orders.
    Mat<Scalar> t_up = Mat<Scalar>::Zero(M, M), t_down = Mat<Scalar>::Zero(M, M);
    for (int i = 0; i < N; ++i) {
        DiffractionChannel ch;
        ch.j = i - n_field;
        ch.kx0 = node.kx0;
        ch.ky = node.ky;
        ch.xi = node.xi;
        ch.kx = k.kx[i];
        ch.kappa = vac.q[i];
        for (Polarization p : all_polarizations) {
            const auto up = tangential_unit_vector(ch, p, Direction::up);
            const auto down = tangential_unit_vector(ch, p, Direction::down);
            const int col = 2 * i + index(p);
            t_up(i, col) = up[0];
            t_up(N + i, col) = up[1];
            t_down(i, col) = down[0];
            t_down(N + i, col) = down[1];
        }
    }
    const auto vac_lu = vac.W.partialPivLu();
    const Mat<Scalar> in_family = vac_lu.solve(t_down);
    return t_up.partialPivLu().solve(vac.W * (r_family * in_family));
}

std::vector<double> zone_kappas(const GratingGeometry& geom, int n_max, const SpectralNode& node) {
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(2 * n_max + 1));
    for (int j = -n_max; j <= n_max; ++j) {
        const double kx = node.kx0 + 2.0 * constants::pi * j / geom.period;
        out.push_back(std::hypot(kx, node.ky, node.xi / constants::c));
    }
    return out;
}

void check_arguments(const GratingGeometry& geom, double eps_value, const TruncationSpec& trunc, const SpectralNode& node) {
    geom.validate();
    trunc.validate();
    if (!(eps_value >= 1.0)) throw InputError("grating permittivity must be >= 1");
    if (!(node.xi > 0.0)) throw InputError("reflection matrix requires xi > 0");
    if (!(std::abs(node.kx0) <= constants::pi / geom.period * (1.0 + 1e-12)))
        throw InputError("Bloch wavevector kx0 outside the first Brillouin zone");
}

} // namespace

ReflectionMatrix reflection_matrix(const GratingGeometry& geom, double eps_value, const TruncationSpec& trunc,
                                   const SpectralNode& node) {
    check_arguments(geom, eps_value, trunc, node);
    const int nf = trunc.field();
    const int n = trunc.n_max;
    double rcond = 1.0;
    const Eigen::MatrixXd full = solve_grating<double>(geom, eps_value, nf, node, 0.0, &rcond);
    const int off = 2 * (nf - n);
    const int size = 2 * (2 * n + 1);
    ReflectionMatrix out(n, node, geom.depth, full.block(off, off, size, size), zone_kappas(geom, n, node));
    out.rcond = rcond;
    out.geometry_id = geom.fingerprint();
    out.eps_value = eps_value;
    if (!out.at_top().allFinite()) throw SolverError("non-finite reflection matrix at node " + describe(node));
    if (rcond < ill_conditioned_rcond) out.warning = "ill-conditioned matching system at node " + describe(node);
    return out;
}

ReflectionMatrix reflection_matrix(const GratingGeometry& geom, const DielectricFunction& eps,
                                   const TruncationSpec& trunc, const SpectralNode& node) {
    return reflection_matrix(geom, eps(node.xi), trunc, node);
}

Eigen::MatrixXcd reflection_matrix_shifted(const GratingGeometry& geom, double eps_value, const TruncationSpec& trunc,
                                           const SpectralNode& node, double origin_offset) {
    check_arguments(geom, eps_value, trunc, node);
    const int nf = trunc.field();
    const int n = trunc.n_max;
    const Eigen::MatrixXcd full = solve_grating<std::complex<double>>(geom, eps_value, nf, node, origin_offset, nullptr);
    const int off = 2 * (nf - n);
    const int size = 2 * (2 * n + 1);
    return full.block(off, off, size, size);
}

} // namespace cpg
