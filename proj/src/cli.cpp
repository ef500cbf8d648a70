#include "cpg/config.hpp"

#include "CLI11.hpp"

#include <ostream>
#include <sstream>

namespace cpg {

namespace {

const char* exit_code_help = R"(Exit codes:
  0  success
  1  unexpected failure
  2  invalid configuration or input data
  3  atom outside the region where the potential formula holds (z_A <= a)
  4  quadrature doubling test exceeded the tolerance
  5  linear-algebra failure in the grating solver
  6  PFA branch ambiguous (atom exactly above a groove edge)

Cache: set CPG_CACHE_DIR (or --cache FILE) to keep reflection matrices between runs.
Options can be read from a key = value file with --config; flags override the file.)";

} // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& log) {
    CLI::App app{"Casimir-Polder potential of an atom above a lamellar dielectric grating", "cpg"};
    app.set_version_flag("--version", program_version);
    app.footer(exit_code_help);
    app.fallthrough();
    app.require_subcommand(1);
    app.set_config("--config", "", "Read options from a key = value file");
    app.allow_config_extras(CLI::config_extras_mode::error);

    RunConfig c;
    double xi_scale = 0.0, k_scale = 0.0;
    bool no_cluster = false, no_check = false;

    app.add_option("--d,--period", c.geom.period, "Grating period d [m]");
    app.add_option("--a,--depth", c.geom.depth, "Groove depth a [m]");
    app.add_option("--s,--groove-width", c.geom.groove_width, "Groove width s [m]");
    app.add_option("--nmax", c.trunc.n_max, "Rayleigh orders kept, |j| <= nmax");
    app.add_option("--nfield", c.trunc.n_field, "Fourier harmonics in the layer (default nmax + 4)");
    app.add_option("--n-xi", c.quad.n_xi, "Imaginary-frequency nodes");
    app.add_option("--n-ky", c.quad.n_ky, "ky nodes");
    app.add_option("--n-kx0", c.quad.n_kx0, "Bloch-wavevector nodes");
    app.add_option("--xi-scale", xi_scale, "Frequency scale of the xi map [rad/s] (default c / distance)");
    app.add_option("--k-scale", k_scale, "Wavevector scale of the ky map [1/m] (default 1 / distance)");
    app.add_flag("--half-domain", c.quad.half_domain, "Integrate ky > 0 only and use parity for the rest");
    app.add_flag("--no-cluster", no_cluster, "Plain Gauss rule on the Brillouin zone");
    app.add_option("--refinement", c.quad.refinement, "Node multiplier of the doubling test");
    app.add_option("--tolerance", c.quad.tolerance, "Relative tolerance of the doubling test");
    app.add_flag("--no-check", no_check, "Skip the quadrature doubling test");
    app.add_flag("--allow-unsafe", c.allow_unsafe_region, "Evaluate at z_A <= a anyway (results flagged unsafe)");

    app.add_option("--eps-model", c.materials.eps_model, "silicon | lorentz | constant | table");
    app.add_option("--eps-static", c.materials.eps_static, "Lorentz static permittivity");
    app.add_option("--eps-inf", c.materials.eps_inf, "Lorentz high-frequency permittivity");
    app.add_option("--eps-omega0", c.materials.eps_omega0, "Lorentz resonance [rad/s]");
    app.add_option("--eps-constant", c.materials.eps_constant, "Frequency-independent permittivity");
    app.add_option("--loss-table", c.materials.loss_table, "Two-column (omega, Im eps) file for eps-model = table");
    app.add_option("--loss-unit", c.materials.loss_unit, "Unit of the loss-table frequencies: rad/s or eV");
    app.add_option("--alpha-model", c.materials.alpha_model, "rubidium | oscillator | none");
    app.add_option("--alpha-static-au", c.materials.alpha_static_au, "Static polarizability [atomic units]");
    app.add_option("--alpha-wavelength", c.materials.alpha_wavelength, "Atomic resonance wavelength [m]");

    app.add_option("--x", c.xs, "Lateral positions x_A [m], comma separated")->delimiter(',');
    app.add_option("--z", c.zs, "Heights z_A [m], comma separated")->delimiter(',');
    app.add_option("--x-points", c.x_points, "Uniform x grid over one period instead of --x");
    app.add_option("--nmax-list", c.n_list, "Truncations for converge, comma separated")->delimiter(',');
    app.add_option("--ratio-min", c.ratio_min, "Figure recipes: smallest z_A / a (fig4: local distance / a)");
    app.add_option("--ratio-max", c.ratio_max, "Figure recipes: largest z_A / a");
    app.add_option("--points", c.points, "Figure recipes: number of grid points");

    app.add_option("--input", c.kk_input, "kk: loss table file");
    app.add_option("--xi-min", c.kk_xi_min, "kk: smallest xi [rad/s]");
    app.add_option("--xi-max", c.kk_xi_max, "kk: largest xi [rad/s]");
    app.add_option("--kk-points", c.kk_points, "kk: log-grid points");

    app.add_option("-o,--out", c.output, "CSV output path (manifest written next to it); default stdout");
    app.add_option("-j,--workers", c.workers, "Worker threads");
    app.add_option("--cache", c.cache_file, "Reflection-matrix cache file");

    const std::vector<std::pair<const char*, const char*>> subcommands = {
        {"potential", "U(x_A, z_A) on an x/z grid"},
        {"plane", "Flat-surface potential U0(z)"},
        {"rho", "PFA ratio rho at given points"},
        {"converge", "Truncation convergence table over --nmax-list"},
        {"kk", "Continue a loss table to imaginary frequency"},
        {"fig2", "rho versus z_A at the plateau midpoint"},
        {"fig3", "rho versus z_A at the groove midpoint"},
        {"fig4", "Lateral rho scan at fixed local distance"},
        {"fig5a", "Lateral profile and cosine fit, d = 2 z_A = 6 a"},
        {"fig5b", "Lateral profile and cosine fit, d = z_A = 2 a"},
    };
    for (const auto& [name, help] : subcommands) app.add_subcommand(name, help);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return exit_ok;
    } catch (const CLI::CallForVersion&) {
        out << program_version << "\n";
        return exit_ok;
    } catch (const CLI::ParseError& e) {
        log << "config error: " << e.what() << "\n";
        return exit_config;
    }

    c.command = app.get_subcommands().front()->get_name();
    if (xi_scale > 0.0) c.quad.xi_scale = xi_scale;
    if (k_scale > 0.0) c.quad.k_scale = k_scale;
    c.quad.cluster_kx0 = !no_cluster;
    c.check_quadrature = !no_check;

    std::vector<std::string> explicit_keys;
    for (const CLI::Option* opt : app.get_options()) {
        if (opt->count() == 0 || opt->get_lnames().empty()) continue;
        const auto& names = opt->get_lnames();
        explicit_keys.insert(explicit_keys.end(), names.begin(), names.end());
    }
    c.apply_recipe(explicit_keys);
    return run(c, out, log);
}

} // namespace cpg
