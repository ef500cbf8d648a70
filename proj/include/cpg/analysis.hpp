#pragma once

#include "cpg/geometry.hpp"
#include "cpg/materials.hpp"
#include "cpg/plane_reflection.hpp"
#include "cpg/potential.hpp"
#include "cpg/quadrature.hpp"

#include <vector>

namespace cpg {

/// Flat-surface reference potential U0 for the PFA, evaluated through the shared integrator.
class PlaneReference {
public:
    PlaneReference(Polarizability alpha, DielectricFunction eps, QuadratureSpec quad)
        : alpha_(std::move(alpha)), eps_(std::move(eps)), quad_(std::move(quad)) {}

    double operator()(double distance) const { return plane_potential(alpha_, eps_, distance, quad_); }

private:
    Polarizability alpha_;
    DielectricFunction eps_;
    QuadratureSpec quad_;
};

struct RhoPoint {
    double x = 0.0;     // m
    double z = 0.0;     // m
    double U = 0.0;     // J
    double U_ref = 0.0; // J, U0 at the local distance
    double rho = 0.0;
    PfaBranch branch = PfaBranch::groove;
};

/// rho = U(x, z) / U0(z - h(x)). Throws AmbiguityError (with both branch values of rho) for an
/// atom exactly above a groove edge of a grating with a > 0.
RhoPoint rho(const PotentialField& field, const PlaneReference& plane, const GratingGeometry& geom, double x);

/// theta = 2 atan(d / (4 (z - a))) in degrees; requires z > a.
double aperture_angle(const GratingGeometry& geom, double z);

/// Two-point cosine fit pinned to the groove and plateau midpoints:
///   fit(x) = mean - amplitude cos(2 pi x / d),
///   mean = (U(0) + U(d/2)) / 2, amplitude = (U(d/2) - U(0)) / 2 (signed).
struct SineFit {
    double mean = 0.0;
    double amplitude = 0.0;
    double residual = 0.0; // max |fit - U| / |amplitude| over the grid, 0 for a flat field

    double operator()(double x, double period) const;
};

SineFit sine_fit(const PotentialField& field, const std::vector<double>& xs);
SineFit sine_fit(const PotentialField& field, int points = 64);

/// d^2 U / d x^2 from the Fourier series.
double stiffness(const PotentialField& field, double x);

/// Mean of U over one period, i.e. C_0.
double spatial_average(const PotentialField& field);

} // namespace cpg
