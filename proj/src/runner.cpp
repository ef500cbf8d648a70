#include "cpg/analysis.hpp"
#include "cpg/config.hpp"
#include "cpg/constants.hpp"
#include "cpg/errors.hpp"
#include "cpg/hash.hpp"
#include "cpg/potential.hpp"
#include "cpg/reflection_cache.hpp"

#include "json.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <memory>
#include <ostream>
#include <sstream>

namespace cpg {

namespace {

using nlohmann::json;

constexpr double nan = std::numeric_limits<double>::quiet_NaN();

std::string num(double v) {
    if (std::isnan(v)) return "nan";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct Row {
    double x, z, U, U0, rho;
    int n_max;
    std::string flags;
};

struct Output {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
    json manifest_extra = json::object();
    std::vector<std::string> summary; // printed to out when the CSV goes to a file
};

void add_potential_row(Output& o, const Row& r) {
    o.rows.push_back({num(r.x), num(r.z), num(r.U), num(r.U0), num(r.rho), std::to_string(r.n_max),
                      r.flags.empty() ? "-" : r.flags});
}

const std::vector<std::string> potential_columns = {"x_A_m", "z_A_m", "U_J", "U0_local_J", "rho", "n_max", "flags"};

std::vector<double> lateral_grid(const RunConfig& c) {
    if (c.x_points > 0) {
        std::vector<double> xs;
        for (int i = 0; i < c.x_points; ++i) xs.push_back(c.geom.period * i / c.x_points);
        return xs;
    }
    return c.xs;
}

struct Context {
    const RunConfig& config;
    PotentialProblem problem;
    PlaneReference plane;
    RunOptions opts;
    json diagnostics = json::array();

    explicit Context(const RunConfig& c, ReflectionCache* cache)
        : config(c),
          problem{c.materials.polarizability(), c.materials.dielectric(), c.geom, c.trunc, c.quad},
          plane(problem.alpha, problem.eps, c.quad) {
        opts.workers = c.workers;
        opts.cache = cache;
        opts.allow_unsafe_region = c.allow_unsafe_region;
        opts.check_quadrature = c.check_quadrature;
    }

    std::vector<PotentialField> scan(const std::vector<double>& zs, const PotentialProblem& p) {
        std::vector<PotentialField> fields = fourier_coefficients_scan(p, zs, opts);
        for (const auto& f : fields) {
            json d = {{"z_A_m", f.z},
                      {"n_max", f.n_max},
                      {"nodes", f.nodes},
                      {"symmetry_residual", f.symmetry_residual},
                      {"quadrature_deviation", f.quadrature_deviation >= 0.0 ? json(f.quadrature_deviation) : json()},
                      {"unsafe_region", f.unsafe_region},
                      {"warnings", f.warnings}};
            diagnostics.push_back(std::move(d));
        }
        return fields;
    }

    std::vector<PotentialField> scan(const std::vector<double>& zs) { return scan(zs, problem); }

    Row row(const PotentialField& f, double x, bool strict) {
        Row r{x, f.z, evaluate(f, x), nan, nan, f.n_max, {}};
        std::string flags;
        try {
            const RhoPoint p = rho(f, plane, problem.geom, x);
            r.U0 = p.U_ref;
            r.rho = p.rho;
            flags = p.branch == PfaBranch::groove ? "groove" : "plateau";
        } catch (const AmbiguityError&) {
            if (strict) throw;
            flags = "edge";
        } catch (const InputError&) {
            if (strict || !f.unsafe_region) throw;
            flags = "below-local-surface";
        }
        if (f.unsafe_region) flags += ";unsafe";
        if (!f.warnings.empty() && !f.unsafe_region) flags += ";warning";
        r.flags = flags;
        return r;
    }
};

void lateral_rows(Context& ctx, Output& o, const std::vector<double>& zs, const std::vector<double>& xs, bool strict) {
    const std::vector<PotentialField> fields = ctx.scan(zs);
    for (const auto& f : fields)
        for (double x : xs) add_potential_row(o, ctx.row(f, x, strict));
}

json fit_json(const PotentialField& f, const SineFit& fit) {
    return {{"z_A_m", f.z},
            {"mean_J", fit.mean},
            {"amplitude_J", fit.amplitude},
            {"residual", fit.residual},
            {"spatial_average_J", spatial_average(f)},
            {"stiffness_groove_J_per_m2", stiffness(f, 0.0)},
            {"stiffness_plateau_J_per_m2", stiffness(f, 0.5 * f.period)}};
}

Output run_command(const RunConfig& c, ReflectionCache* cache) {
    Output o;
    if (c.command == "kk") {
        std::ifstream in(c.kk_input);
        if (!in) throw InputError("cannot open loss table '" + c.kk_input + "'");
        const FrequencyUnit unit = c.materials.loss_unit == "rad/s" ? FrequencyUnit::rad_per_s : FrequencyUnit::electron_volt;
        const DielectricFunction eps = DielectricFunction::tabulated(read_loss_table(in, unit));
        o.columns = {"xi_rad_s", "eps_imag_axis"};
        const double step = std::log(c.kk_xi_max / c.kk_xi_min) / (c.kk_points - 1);
        for (int i = 0; i < c.kk_points; ++i) {
            const double xi = i == c.kk_points - 1 ? c.kk_xi_max : c.kk_xi_min * std::exp(step * i);
            o.rows.push_back({num(xi), num(eps(xi))});
        }
        o.manifest_extra["eps"] = {{"model", eps.describe()}, {"fingerprint", hex64(eps.fingerprint())}};
        o.summary.push_back("wrote " + std::to_string(o.rows.size()) + " samples of eps(i xi)");
        return o;
    }

    Context ctx(c, cache);
    o.columns = potential_columns;

    if (c.command == "plane") {
        for (double z : c.zs) {
            double u = 0.0;
            if (c.check_quadrature) {
                const CheckedPotential r = plane_potential_checked(ctx.problem.alpha, ctx.problem.eps, z, c.quad);
                u = r.value;
                ctx.diagnostics.push_back({{"z_A_m", z}, {"quadrature_deviation", r.deviation}});
            } else {
                u = ctx.plane(z);
            }
            add_potential_row(o, {0.0, z, u, u, 1.0, 0, "plane"});
            o.summary.push_back("U0(" + num(z) + " m) = " + num(u) + " J");
        }
    } else if (c.command == "potential") {
        lateral_rows(ctx, o, c.zs, lateral_grid(c), false);
    } else if (c.command == "rho") {
        lateral_rows(ctx, o, c.zs, lateral_grid(c), true);
    } else if (c.command == "converge") {
        o.columns = {"x_A_m", "z_A_m", "n_max", "U_J", "rel_deviation"};
        json tables = json::array();
        for (double z : c.zs) {
            const ConvergenceTable t = converge_nmax(ctx.problem, z, c.n_list, lateral_grid(c), ctx.opts);
            for (const auto& r : t.rows) {
                for (std::size_t k = 0; k < t.n_list.size(); ++k)
                    o.rows.push_back({num(r.x), num(z), std::to_string(t.n_list[k]), num(r.values[k]), num(r.deviations[k])});
                double worst = 0.0;
                for (double d : r.deviations) worst = std::max(worst, d);
                tables.push_back({{"x_A_m", r.x}, {"z_A_m", z}, {"max_deviation", worst}});
            }
        }
        o.manifest_extra["convergence"] = tables;
    } else if (c.command == "fig2" || c.command == "fig3") {
        lateral_rows(ctx, o, c.zs, c.xs, true);
        json angles = json::array();
        for (double z : c.zs) angles.push_back(z > c.geom.depth ? json(aperture_angle(c.geom, z)) : json());
        o.manifest_extra["aperture_angle_deg"] = angles;
    } else if (c.command == "fig4") {
        const double a = c.geom.depth, d = c.geom.period;
        const double local = c.ratio_min * a;
        const std::vector<double> zs = {local, local + a};
        const std::vector<PotentialField> fields = ctx.scan(zs);
        for (int i = 0; i < c.points; ++i) {
            const double x = d * (i + 0.5) / c.points;
            const bool groove = std::abs(c.geom.fold(x)) < 0.5 * c.geom.groove_width;
            add_potential_row(o, ctx.row(fields[groove ? 0 : 1], x, true));
        }
    } else if (c.command == "fig5a" || c.command == "fig5b" ) {
        const std::vector<double> xs = lateral_grid(c);
        const std::vector<PotentialField> fields = ctx.scan(c.zs);
        json fits = json::array();
        for (const auto& f : fields) {
            for (double x : xs) add_potential_row(o, ctx.row(f, x, false));
            const SineFit fit = sine_fit(f, xs);
            fits.push_back(fit_json(f, fit));
            std::ostringstream os;
            os.precision(6);
            os << "z_A = " << f.z << " m: mean " << fit.mean << " J, amplitude " << fit.amplitude
               << " J, cosine-fit residual " << fit.residual;
            o.summary.push_back(os.str());
        }
        o.manifest_extra["sine_fit"] = fits;
    }
    o.manifest_extra["diagnostics"] = ctx.diagnostics;
    if (o.summary.empty()) o.summary.push_back("wrote " + std::to_string(o.rows.size()) + " rows");
    return o;
}

void write_csv(std::ostream& os, const RunConfig& c, const std::string& hash, const Output& o) {
    os << "# cpg csv v" << csv_format_version << " command=" << c.command << " inputs_hash=" << hash << "\n";
    for (std::size_t i = 0; i < o.columns.size(); ++i) os << (i ? "," : "") << o.columns[i];
    os << "\n";
    for (const auto& r : o.rows) {
        for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << r[i];
        os << "\n";
    }
}

std::string cache_path(const RunConfig& c) {
    if (!c.cache_file.empty()) return c.cache_file;
    if (const char* dir = std::getenv("CPG_CACHE_DIR"); dir && *dir)
        return (std::filesystem::path(dir) / "reflections.cpgcache").string();
    return {};
}

} // namespace

int run(const RunConfig& config, std::ostream& out, std::ostream& log) {
    try {
        config.validate();
        const std::string hash = hex64(config.hash());

        std::unique_ptr<ReflectionCache> cache;
        const std::string cpath = cache_path(config);
        if (!cpath.empty() && config.command != "kk" && config.command != "plane") {
            cache = std::make_unique<ReflectionCache>();
            if (std::filesystem::exists(cpath)) {
                try {
                    cache->load(cpath);
                } catch (const InputError& e) {
                    log << "warning: ignoring reflection cache: " << e.what() << "\n";
                    cache = std::make_unique<ReflectionCache>();
                }
            }
        }

        const Output o = run_command(config, cache.get());

        if (cache) {
            try {
                cache->save(cpath);
            } catch (const InputError& e) {
                log << "warning: " << e.what() << "\n";
            }
        }

        for (const auto& d : o.manifest_extra.value("diagnostics", json::array()))
            for (const auto& w : d.value("warnings", json::array())) log << "warning: " << w.get<std::string>() << "\n";

        if (config.output.empty()) {
            write_csv(out, config, hash, o);
            return exit_ok;
        }
        {
            std::ofstream f(config.output, std::ios::trunc);
            if (!f) throw InputError("cannot write output '" + config.output + "'");
            write_csv(f, config, hash, o);
        }
        json manifest;
        manifest["format"] = "cpg-run-manifest";
        manifest["format_version"] = manifest_format_version;
        manifest["program"] = {{"name", "cpg"}, {"version", program_version}, {"csv_format_version", csv_format_version}};
        manifest["inputs_hash"] = hash;
        manifest["inputs"] = json::parse(config.canonical());
        manifest["output"] = {{"csv", std::filesystem::path(config.output).filename().string()}, {"rows", o.rows.size()}};
        for (const auto& [k, v] : o.manifest_extra.items()) manifest[k] = v;
        std::ofstream m(config.output + ".manifest.json", std::ios::trunc);
        if (!m) throw InputError("cannot write manifest '" + config.output + ".manifest.json'");
        m << manifest.dump(2) << "\n";
        for (const auto& s : o.summary) out << s << "\n";
        return exit_ok;
    } catch (const InputError& e) {
        log << "config error: " << e.what() << "\n";
        return exit_config;
    } catch (const RegionError& e) {
        log << "region error: " << e.what() << "\n";
        return exit_region;
    } catch (const ConvergenceError& e) {
        log << "convergence error: " << e.what() << "\n";
        return exit_convergence;
    } catch (const SolverError& e) {
        log << "solver error: " << e.what() << "\n";
        return exit_solver;
    } catch (const AmbiguityError& e) {
        log << "ambiguous PFA branch: " << e.what() << "\n";
        return exit_ambiguous;
    } catch (const std::exception& e) {
        log << "error: " << e.what() << "\n";
        return exit_failure;
    }
}

} // namespace cpg
