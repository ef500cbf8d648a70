#pragma once

#include "cpg/geometry.hpp"
#include "cpg/materials.hpp"
#include "cpg/quadrature.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace cpg {

/// Exit codes of the command-line runner.
enum ExitCode : int {
    exit_ok = 0,
    exit_failure = 1,
    exit_config = 2,
    exit_region = 3,
    exit_convergence = 4,
    exit_solver = 5,
    exit_ambiguous = 6,
};

struct MaterialConfig {
    std::string eps_model = "silicon"; // silicon | lorentz | constant | table
    double eps_static = presets::si_eps_static;
    double eps_inf = presets::si_eps_inf;
    double eps_omega0 = presets::si_omega0; // rad/s
    double eps_constant = presets::si_eps_static;
    std::string loss_table;                 // path, eps_model = table
    std::string loss_unit = "rad/s";        // default unit of the loss table, "rad/s" or "eV"

    std::string alpha_model = "rubidium"; // rubidium | oscillator | none
    double alpha_static_au = presets::rb_alpha_static_au;
    double alpha_wavelength = presets::rb_resonance_wavelength; // m

    DielectricFunction dielectric() const;
    Polarizability polarizability() const;
};

/// Everything one run depends on. Defaults are the Rb / Si system over the a = 100 nm,
/// d = 600 nm, s = 300 nm grating.
struct RunConfig {
    std::string command; // potential | plane | rho | converge | kk | fig2 | fig3 | fig4 | fig5a | fig5b

    GratingGeometry geom{600e-9, 100e-9, 300e-9};
    MaterialConfig materials;
    TruncationSpec trunc;
    QuadratureSpec quad;
    bool check_quadrature = true;
    bool allow_unsafe_region = false;

    std::vector<double> xs;  // m
    std::vector<double> zs;  // m
    int x_points = 0;        // > 0: uniform grid of this many points over one period instead of xs
    std::vector<int> n_list; // converge

    // Figure recipes: heights z_A / a from ratio_min to ratio_max in `points` steps.
    double ratio_min = 0.0;
    double ratio_max = 0.0;
    int points = 0;

    // kk
    std::string kk_input;
    double kk_xi_min = 1e12; // rad/s
    double kk_xi_max = 1e18; // rad/s
    int kk_points = 61;

    // Do not affect results.
    std::string output; // CSV path; empty writes the CSV to stdout
    int workers = 1;
    std::string cache_file;

    /// Fills recipe defaults (geometry, grids) for the figure commands. Values that the user
    /// set explicitly are kept; `explicit_keys` lists them by config key.
    void apply_recipe(const std::vector<std::string>& explicit_keys);

    /// Throws InputError naming the offending field.
    void validate() const;

    /// Canonical description of the result-relevant inputs (JSON text, sorted keys).
    std::string canonical() const;
    std::uint64_t hash() const;
};

/// Executes a run. Writes the CSV (to config.output or `out`) and, if config.output is set, the
/// manifest next to it as <output>.manifest.json. Human-readable notes go to `log`.
/// Returns an ExitCode; never throws.
int run(const RunConfig& config, std::ostream& out, std::ostream& log);

/// Parses command-line arguments (CLI11; --config FILE reads key = value pairs, command-line
/// flags take precedence) and runs. Returns an ExitCode.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& log);

inline constexpr const char* program_version = "1.0.0";
inline constexpr int csv_format_version = 1;
inline constexpr int manifest_format_version = 1;

} // namespace cpg
