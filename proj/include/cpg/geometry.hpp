#pragma once

#include <cstdint>

namespace cpg {

/// Rectangular grating of period d: vacuum grooves of width s centred at x = 0 (mod d) cut
/// to depth a into a half-space of the grating medium. The groove bottom is z = 0, the ridge
/// tops are z = a. s = d is a flat surface at z = 0, s = 0 a flat surface at z = a.
struct GratingGeometry {
    double period;       // d, m
    double depth;        // a, m
    double groove_width; // s, m

    void validate() const;

    /// Local surface height h(x): 0 above a groove, a above a ridge.
    double height(double x) const;

    /// x folded to [-d/2, d/2).
    double fold(double x) const;

    std::uint64_t fingerprint() const;
};

/// Rayleigh orders kept in the output (-n_max..n_max) and Fourier harmonics kept in the
/// layer eigenproblem (-n_field..n_field).
struct TruncationSpec {
    int n_max = 3;
    int n_field = -1; // < 0 selects n_max + 4

    static TruncationSpec with_default_field(int n_max) { return {n_max, n_max + 4}; }

    int field() const noexcept { return n_field < 0 ? n_max + 4 : n_field; }
    int zones() const noexcept { return 2 * n_max + 1; }
    void validate() const;
};

} // namespace cpg
