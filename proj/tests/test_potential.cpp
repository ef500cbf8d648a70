#include "doctest.h"

#include "cpg/constants.hpp"
#include "cpg/errors.hpp"
#include "cpg/plane_reflection.hpp"
#include "cpg/potential.hpp"
#include "cpg/reflection_cache.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

using namespace cpg;

namespace {

QuadratureSpec small_quad(int n = 16, int nk = 8) {
    QuadratureSpec q;
    q.n_xi = n;
    q.n_ky = n;
    q.n_kx0 = nk;
    return q;
}

PotentialProblem problem(GratingGeometry g, int n_max, QuadratureSpec q) {
    return {presets::rubidium(), presets::silicon(), g, {n_max}, q};
}

PotentialField hand_field(double period, std::vector<double> c) {
    PotentialField f;
    f.period = period;
    f.n_max = static_cast<int>(c.size() / 4);
    f.coefficients = std::move(c);
    return f;
}

std::string temp_path(const char* name) { return (std::filesystem::temp_directory_path() / name).string(); }

} // namespace

TEST_CASE("node kernel contraction") {
    const double d = 600e-9;
    const SpectralNode node{2e6, -3e6, 1.5e15};
    const auto overlaps = zone_overlaps(2, node, d);
    REQUIRE(overlaps.size() == 25);

    SUBCASE("zero reflection") {
        ReflectionMatrix R(2, node, 0.0, Eigen::MatrixXd::Zero(10, 10), std::vector<double>(5, 1e7));
        CHECK(node_kernel(R, overlaps).K.isZero(0.0));
    }
    SUBCASE("flat interface at normal ky") {
        const SpectralNode n0{2e6, 0.0, 1.5e15};
        const auto ch = make_channel(0, n0.kx0, 0.0, n0.xi, d);
        const auto f = fresnel(6.0, std::abs(n0.kx0), n0.xi);
        ReflectionMatrix R(0, n0, 0.0, fresnel_HE(6.0, n0.kx0, 0.0, n0.xi), {ch.kappa});
        const auto o = polarization_overlap(ch, ch);
        const double want = f.r_tm * o(Polarization::H, Polarization::H) + f.r_te * o(Polarization::E, Polarization::E);
        CHECK(node_kernel(R, {o}).K(0, 0) == want);
    }
    SUBCASE("random matrix against a naive loop") {
        std::mt19937_64 rng(8);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        Eigen::MatrixXd top(10, 10);
        for (int r = 0; r < 10; ++r)
            for (int c = 0; c < 10; ++c) top(r, c) = u(rng);
        ReflectionMatrix R(2, node, 1e-7, top, std::vector<double>(5, 1e7));
        const auto k = node_kernel(R, overlaps);
        CHECK(k.reference_height == 1e-7);
        for (int j = -2; j <= 2; ++j) {
            for (int jp = -2; jp <= 2; ++jp) {
                double sum = 0.0;
                for (auto p : all_polarizations)
                    for (auto q : all_polarizations)
                        sum += top(ReflectionMatrix::composite(j, p, 2), ReflectionMatrix::composite(jp, q, 2)) *
                               overlaps[(j + 2) * 5 + (jp + 2)](p, q);
                CHECK(k.K(j + 2, jp + 2) == doctest::Approx(sum).epsilon(1e-15));
            }
        }
    }
    CHECK_THROWS_AS(node_kernel(ReflectionMatrix(1, node, 0.0, Eigen::MatrixXd::Zero(6, 6), std::vector<double>(3, 1.0)), overlaps),
                    std::logic_error);
}

TEST_CASE("no atom or no medium gives no potential") {
    const GratingGeometry g{600e-9, 100e-9, 300e-9};
    auto p = problem(g, 1, small_quad(8, 4));
    p.alpha = Polarizability::zero();
    for (double c : fourier_coefficients(p, 300e-9).coefficients) CHECK(c == 0.0);
    p = problem(g, 1, small_quad(8, 4));
    p.eps = DielectricFunction::constant(1.0);
    for (double c : fourier_coefficients(p, 300e-9).coefficients) CHECK(c == 0.0);
}

TEST_CASE("flat grating reproduces the plane potential") {
    // The zone sum truncates kx at (2 n_max + 1) pi / d, so the period is kept short.
    const GratingGeometry flat{100e-9, 0.0, 50e-9};
    const auto q = small_quad(32, 16);
    const double z = 100e-9;
    const auto f = fourier_coefficients(problem(flat, 1, q), z);
    const double U0 = plane_potential(presets::rubidium(), presets::silicon(), z, {});
    CHECK(std::abs(f.coefficient(0) / U0 - 1.0) <= 1e-3);
    for (int m = 1; m <= f.max_order(); ++m) {
        CHECK(std::abs(f.coefficient(m)) <= 1e-6 * std::abs(f.coefficient(0)));
        CHECK(std::abs(f.coefficient(-m)) <= 1e-6 * std::abs(f.coefficient(0)));
    }
}

TEST_CASE("filled grooves: flat surface at the ridge tops") {
    const GratingGeometry slab{100e-9, 40e-9, 0.0};
    const double z = 100e-9;
    const auto f = fourier_coefficients(problem(slab, 2, small_quad(32, 16)), z);
    const double U0 = plane_potential(presets::rubidium(), presets::silicon(), z - slab.depth, {});
    CHECK(std::abs(f.coefficient(0) / U0 - 1.0) <= 1e-3);
    for (int m = 1; m <= f.max_order(); ++m) CHECK(std::abs(f.coefficient(m)) <= 1e-6 * std::abs(f.coefficient(0)));
}

TEST_CASE("dilute medium: lateral mean is the area-weighted plane result") {
    // To first order in eps - 1 the interaction is pairwise additive, so averaging over x_A
    // weighs the groove bottom and the ridge tops by their area fractions.
    const double eta = 1e-4;
    const auto eps = DielectricFunction::constant(1.0 + eta);
    const auto alpha = presets::rubidium();
    for (double s : {25e-9, 50e-9, 80e-9}) {
        const GratingGeometry g{100e-9, 20e-9, s};
        const double z = 80e-9;
        PotentialProblem p{alpha, eps, g, {2}, small_quad(32, 16)};
        const double C0 = fourier_coefficients(p, z).coefficient(0);
        const double fill = s / g.period;
        const double want = fill * plane_potential(alpha, eps, z, {}) + (1 - fill) * plane_potential(alpha, eps, z - g.depth, {});
        CHECK(C0 / want == doctest::Approx(1.0).epsilon(5e-4));
    }
}

TEST_CASE("lateral series evaluation") {
    const double d = 600e-9;
    const auto flat = hand_field(d, {0, 0, 0, 0, -2.0, 0, 0, 0, 0});
    for (double x : {0.0, 1e-7, 3.3e-7}) CHECK(evaluate(flat, x) == -2.0);
    const auto f = hand_field(d, {0.1, -0.3, 0.7, 0.2, -2.0, 0.2, 0.7, -0.3, 0.1});
    CHECK(evaluate(f, 0.0) == evaluate(f, d));
    const auto one = hand_field(d, {0, 0, 0, 0.4, -2.0, 0.4, 0, 0, 0});
    CHECK(evaluate(one, d / 4) == doctest::Approx(-2.0).epsilon(1e-15));
    CHECK(evaluate(one, 0.0) == doctest::Approx(-1.2).epsilon(1e-15));
    // analytic second derivative
    const double h = 1e-10;
    const double x = 0.123 * d;
    const double fd = (evaluate(f, x + h) - 2 * evaluate(f, x) + evaluate(f, x - h)) / (h * h);
    CHECK(curvature(f, x) == doctest::Approx(fd).epsilon(1e-4));
    CHECK(f.coefficient(5) == 0.0); // beyond the truncation
}

TEST_CASE("grating potential properties") {
    const GratingGeometry g{600e-9, 100e-9, 300e-9};
    const auto p = problem(g, 3, small_quad(16, 8));
    const std::vector<double> zs{250e-9, 300e-9, 400e-9, 600e-9};
    const auto fields = fourier_coefficients_scan(p, zs);
    REQUIRE(fields.size() == zs.size());
    for (std::size_t i = 0; i < fields.size(); ++i) {
        const auto& f = fields[i];
        CHECK(f.z == zs[i]);
        CHECK(f.symmetry_residual <= 1e-10);
        double worst = 0.0;
        for (int k = 0; k < 64; ++k) {
            const double x = g.period * k / 64.0;
            const double u = evaluate(f, x);
            CHECK(u < 0.0);
            worst = std::max(worst, std::abs(u - evaluate(f, g.period - x)) / std::abs(u));
        }
        CHECK(worst <= 1e-3);
        for (int m = 1; m < f.max_order(); ++m) CHECK(std::abs(f.coefficient(m + 1)) < std::abs(f.coefficient(m)));
    }
    for (double x : {0.0, g.period / 2}) {
        for (std::size_t i = 1; i < fields.size(); ++i) CHECK(std::abs(evaluate(fields[i], x)) < std::abs(evaluate(fields[i - 1], x)));
    }
}

TEST_CASE("half-domain integration") {
    const GratingGeometry g{600e-9, 100e-9, 300e-9};
    auto q = small_quad(16, 8);
    const auto full = fourier_coefficients(problem(g, 2, q), 300e-9);
    q.half_domain = true;
    const auto half = fourier_coefficients(problem(g, 2, q), 300e-9);
    const double scale = std::abs(full.coefficient(0));
    for (int m = -4; m <= 4; ++m) CHECK(std::abs(half.coefficient(m) - full.coefficient(m)) <= 1e-8 * scale);
    q.n_ky = 15;
    CHECK_THROWS_AS(fourier_coefficients(problem(g, 2, q), 300e-9), InputError);
}

TEST_CASE("worker count does not change a single bit") {
    const GratingGeometry g{600e-9, 100e-9, 300e-9};
    const auto p = problem(g, 2, small_quad(12, 6));
    RunOptions one;
    RunOptions three;
    three.workers = 3;
    const auto a = fourier_coefficients(p, 350e-9, one);
    const auto b = fourier_coefficients(p, 350e-9, three);
    CHECK(a.coefficients == b.coefficients);
}

TEST_CASE("region and convergence errors") {
    const GratingGeometry g{600e-9, 100e-9, 300e-9};
    const auto p = problem(g, 1, small_quad(8, 4));
    CHECK_THROWS_AS(fourier_coefficients(p, 100e-9), RegionError);
    CHECK_THROWS_AS(fourier_coefficients(p, 50e-9), RegionError);
    RunOptions unsafe;
    unsafe.allow_unsafe_region = true;
    const auto f = fourier_coefficients(p, 80e-9, unsafe);
    CHECK(f.unsafe_region);
    CHECK_FALSE(f.warnings.empty());
    CHECK_FALSE(fourier_coefficients(p, 300e-9).unsafe_region);

    auto strict = p;
    strict.quad.tolerance = 1e-12;
    RunOptions check;
    check.check_quadrature = true;
    try {
        fourier_coefficients(strict, 300e-9, check);
        FAIL("expected ConvergenceError");
    } catch (const ConvergenceError& e) {
        CHECK(e.coarse() < 0.0);
        CHECK(e.refined() < 0.0);
        CHECK(e.coarse() != e.refined());
    }
    const auto ok = fourier_coefficients(problem(g, 1, small_quad(16, 8)), 300e-9, check);
    CHECK(ok.quadrature_deviation >= 0.0);
    CHECK(ok.quadrature_deviation <= 5e-3);
}

TEST_CASE("truncation warning close to the ridges") {
    const GratingGeometry g{600e-9, 100e-9, 300e-9};
    const auto near = fourier_coefficients(problem(g, 0, small_quad(8, 4)), 120e-9);
    CHECK(near.truncation_estimate > truncation_warning_level);
    CHECK_FALSE(near.warnings.empty());
    const auto far = fourier_coefficients(problem(g, 3, small_quad(8, 4)), 400e-9);
    CHECK(far.truncation_estimate < truncation_warning_level);
    CHECK(far.warnings.empty());
}

TEST_CASE("convergence in the number of Rayleigh orders") {
    const GratingGeometry g{600e-9, 100e-9, 300e-9};
    const auto p = problem(g, 3, small_quad(12, 6));
    const auto same = converge_nmax(p, 300e-9, {0, 0}, {0.0, 300e-9});
    for (const auto& row : same.rows) CHECK(row.deviations[0] == 0.0);

    const auto t = converge_nmax(p, 500e-9, {1, 2, 3, 4, 6}, {0.0, 300e-9});
    for (const auto& row : t.rows) {
        CHECK(row.deviations.back() == 0.0);
        for (std::size_t i = 1; i + 1 < row.deviations.size(); ++i) CHECK(row.deviations[i] < row.deviations[i - 1]);
    }
    CHECK_THROWS_AS(converge_nmax(p, 500e-9, {3, 2}, {0.0}), InputError);
    CHECK_THROWS_AS(converge_nmax(p, 500e-9, {}, {0.0}), InputError);
}

TEST_CASE("reflection cache") {
    const GratingGeometry g{600e-9, 100e-9, 300e-9};
    const auto p = problem(g, 1, small_quad(8, 4));
    ReflectionCache cache;
    RunOptions opts;
    opts.cache = &cache;
    const auto first = fourier_coefficients(p, 300e-9, opts);
    const std::size_t n = cache.size();
    CHECK(n > 0);
    CHECK(cache.hits() == 0);
    const auto second = fourier_coefficients(p, 300e-9, opts);
    CHECK(cache.hits() == n);
    CHECK(first.coefficients == second.coefficients);
    CHECK(first.coefficients == fourier_coefficients(p, 300e-9).coefficients);

    const std::string path = temp_path("cpg_test_cache.bin");
    cache.save(path);
    ReflectionCache loaded;
    loaded.load(path);
    CHECK(loaded.size() == n);
    opts.cache = &loaded;
    CHECK(fourier_coefficients(p, 300e-9, opts).coefficients == first.coefficients);
    CHECK(loaded.hits() == n);

    // equal caches give equal files
    const std::string again = temp_path("cpg_test_cache2.bin");
    loaded.save(again);
    std::ifstream fa(path, std::ios::binary), fb(again, std::ios::binary);
    const std::string ba((std::istreambuf_iterator<char>(fa)), {});
    const std::string bb((std::istreambuf_iterator<char>(fb)), {});
    CHECK(ba == bb);

    const SpectralNode node{0.0, 1e6, 1e15};
    CHECK(reflection_key(g, 11.0, {1}, node) != reflection_key(g, 11.5, {1}, node));
    CHECK(reflection_key(g, 11.0, {1}, node) != reflection_key(g, 11.0, {2}, node));
    CHECK(reflection_key(g, 11.0, {1}, node) != reflection_key({600e-9, 90e-9, 300e-9}, 11.0, {1}, node));

    const std::string bad = temp_path("cpg_test_cache_bad.bin");
    {
        std::ofstream out(bad, std::ios::binary);
        out << "NOTACACHEFILE";
    }
    ReflectionCache c2;
    CHECK_THROWS_AS(c2.load(bad), InputError);
    {
        std::ofstream out(bad, std::ios::binary);
        out.write(ba.data(), static_cast<std::streamsize>(ba.size() / 2));
    }
    CHECK_THROWS_AS(c2.load(bad), InputError);
    std::filesystem::remove(path);
    std::filesystem::remove(again);
    std::filesystem::remove(bad);
}
