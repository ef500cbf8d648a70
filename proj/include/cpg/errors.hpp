#pragma once

#include <stdexcept>
#include <string>

namespace cpg {

/// Invalid user input: malformed data, out-of-range parameters.
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Atom placed where the Rayleigh-expansion formula for the potential does not hold.
class RegionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Quadrature refinement changed the result by more than the configured tolerance.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, double coarse, double refined)
        : std::runtime_error(what), coarse_(coarse), refined_(refined) {}

    double coarse() const noexcept { return coarse_; }
    double refined() const noexcept { return refined_; }

private:
    double coarse_;
    double refined_;
};

/// Linear-algebra failure inside the grating solver.
class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// PFA branch undefined for an atom exactly above a groove edge.
class AmbiguityError : public std::runtime_error {
public:
    AmbiguityError(const std::string& what, double groove_value, double plateau_value)
        : std::runtime_error(what), groove_(groove_value), plateau_(plateau_value) {}

    double groove_value() const noexcept { return groove_; }
    double plateau_value() const noexcept { return plateau_; }

private:
    double groove_;
    double plateau_;
};

} // namespace cpg
