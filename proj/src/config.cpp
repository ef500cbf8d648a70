#include "cpg/config.hpp"

#include "cpg/constants.hpp"
#include "cpg/errors.hpp"
#include "cpg/hash.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>

namespace cpg {

namespace {

bool has(const std::vector<std::string>& keys, const std::string& k) {
    return std::find(keys.begin(), keys.end(), k) != keys.end();
}

void require_positive(double v, const char* field) {
    if (!(v > 0.0) || !std::isfinite(v)) throw InputError(std::string("config field '") + field + "' must be positive");
}

FrequencyUnit parse_unit(const std::string& u) {
    if (u == "rad/s") return FrequencyUnit::rad_per_s;
    if (u == "eV" || u == "ev") return FrequencyUnit::electron_volt;
    throw InputError("config field 'loss-unit' must be 'rad/s' or 'eV', got '" + u + "'");
}

std::uint64_t file_fingerprint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open '" + path + "'");
    const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return Fnv1a{}.str(bytes).digest();
}

const std::vector<std::string> commands = {"potential", "plane", "rho",   "converge", "kk",
                                           "fig2",      "fig3",  "fig4",  "fig5a",    "fig5b"};

} // namespace

DielectricFunction MaterialConfig::dielectric() const {
    if (eps_model == "silicon") return presets::silicon();
    if (eps_model == "lorentz") return DielectricFunction::lorentz(eps_static, eps_inf, eps_omega0);
    if (eps_model == "constant") return DielectricFunction::constant(eps_constant);
    if (eps_model == "table") {
        if (loss_table.empty()) throw InputError("config field 'loss-table' is required with eps-model = table");
        std::ifstream in(loss_table);
        if (!in) throw InputError("cannot open loss table '" + loss_table + "'");
        return DielectricFunction::tabulated(read_loss_table(in, parse_unit(loss_unit)));
    }
    throw InputError("config field 'eps-model' must be silicon, lorentz, constant or table, got '" + eps_model + "'");
}

Polarizability MaterialConfig::polarizability() const {
    if (alpha_model == "rubidium") return presets::rubidium();
    if (alpha_model == "oscillator") {
        require_positive(alpha_wavelength, "alpha-wavelength");
        if (!(alpha_static_au >= 0.0)) throw InputError("config field 'alpha-static-au' must be non-negative");
        return Polarizability::oscillator(polarizability_from_au(alpha_static_au),
                                          2.0 * constants::pi * constants::c / alpha_wavelength);
    }
    if (alpha_model == "none") return Polarizability::zero();
    throw InputError("config field 'alpha-model' must be rubidium, oscillator or none, got '" + alpha_model + "'");
}

void RunConfig::apply_recipe(const std::vector<std::string>& keys) {
    auto set = [&](const char* key, auto& field, auto value) {
        if (!has(keys, key)) field = value;
    };
    const bool fig = command.rfind("fig", 0) == 0;
    if (!fig) return;

    if (command == "fig5b") {
        set("depth", geom.depth, 100e-9);
        set("period", geom.period, 2.0 * geom.depth);
    } else {
        set("depth", geom.depth, 100e-9);
        set("period", geom.period, 6.0 * geom.depth);
    }
    set("groove-width", geom.groove_width, 0.5 * geom.period);

    const double a = geom.depth, d = geom.period;
    if (command == "fig2" || command == "fig3") {
        set("ratio-min", ratio_min, 2.0);
        set("ratio-max", ratio_max, 10.0);
        set("points", points, 17);
        set("x", xs, std::vector<double>{command == "fig2" ? 0.5 * d : 0.0});
        if (!has(keys, "z")) {
            zs.clear();
            for (int i = 0; i < points; ++i)
                zs.push_back(a * (points == 1 ? ratio_min : ratio_min + (ratio_max - ratio_min) * i / (points - 1)));
        }
    } else if (command == "fig4") {
        set("ratio-min", ratio_min, 3.0); // local distance / a
        set("points", points, 48);
    } else if (command == "fig5a" || command == "fig5b") {
        set("z", zs, std::vector<double>{command == "fig5a" ? 3.0 * a : d});
        set("x-points", x_points, 64);
    }
}

void RunConfig::validate() const {
    if (std::find(commands.begin(), commands.end(), command) == commands.end())
        throw InputError("unknown command '" + command + "'");
    if (command == "kk") {
        if (kk_input.empty()) throw InputError("config field 'input' is required for kk");
        require_positive(kk_xi_min, "xi-min");
        if (!(kk_xi_max > kk_xi_min)) throw InputError("config field 'xi-max' must exceed 'xi-min'");
        if (kk_points < 2) throw InputError("config field 'kk-points' must be at least 2");
        parse_unit(materials.loss_unit);
        return;
    }
    require_positive(geom.period, "period");
    if (!(geom.depth >= 0.0)) throw InputError("config field 'depth' must be non-negative");
    if (!(geom.groove_width >= 0.0) || geom.groove_width > geom.period)
        throw InputError("config field 'groove-width' must lie in [0, period]");
    try {
        trunc.validate();
        quad.validate();
    } catch (const InputError& e) {
        throw InputError(std::string("config: ") + e.what());
    }
    if (workers < 1) throw InputError("config field 'workers' must be at least 1");
    for (double z : zs) require_positive(z, "z");
    for (double x : xs)
        if (!std::isfinite(x)) throw InputError("config field 'x' must be finite");
    if (x_points < 0) throw InputError("config field 'x-points' must be non-negative");

    const bool needs_z = command != "fig4";
    if (needs_z && zs.empty()) throw InputError("config field 'z' must list at least one height");
    if ((command == "potential" || command == "rho" || command == "converge") && xs.empty() && x_points == 0)
        throw InputError("config field 'x' must list at least one lateral position (or set 'x-points')");
    if (command == "converge") {
        if (n_list.empty()) throw InputError("config field 'nmax-list' must list at least one truncation");
        for (std::size_t i = 0; i < n_list.size(); ++i) {
            if (n_list[i] < 0) throw InputError("config field 'nmax-list' must be non-negative");
            if (i > 0 && n_list[i] < n_list[i - 1]) throw InputError("config field 'nmax-list' must be non-decreasing");
        }
    }
    if (command == "fig4") {
        require_positive(ratio_min, "ratio-min");
        if (points < 1) throw InputError("config field 'points' must be at least 1");
    }
    materials.dielectric();
    materials.polarizability();
}

std::string RunConfig::canonical() const {
    nlohmann::json j;
    j["command"] = command;
    if (command == "kk") {
        j["input_fingerprint"] = hex64(file_fingerprint(kk_input));
    }
    j["period_m"] = geom.period;
    j["depth_m"] = geom.depth;
    j["groove_width_m"] = geom.groove_width;
    j["n_max"] = trunc.n_max;
    j["n_field"] = trunc.field();
    j["quadrature"] = {{"n_xi", quad.n_xi},
                       {"n_ky", quad.n_ky},
                       {"n_kx0", quad.n_kx0},
                       {"xi_scale", quad.xi_scale ? nlohmann::json(*quad.xi_scale) : nlohmann::json()},
                       {"k_scale", quad.k_scale ? nlohmann::json(*quad.k_scale) : nlohmann::json()},
                       {"cluster_kx0", quad.cluster_kx0},
                       {"half_domain", quad.half_domain},
                       {"refinement", quad.refinement},
                       {"tolerance", quad.tolerance},
                       {"check", check_quadrature}};
    j["allow_unsafe_region"] = allow_unsafe_region;
    j["x_m"] = xs;
    j["x_points"] = x_points;
    j["z_m"] = zs;
    j["nmax_list"] = n_list;
    j["ratio_min"] = ratio_min;
    j["ratio_max"] = ratio_max;
    j["points"] = points;
    j["kk"] = {{"xi_min", kk_xi_min}, {"xi_max", kk_xi_max}, {"points", kk_points}, {"unit", materials.loss_unit}};
    if (command != "kk") {
        const DielectricFunction eps = materials.dielectric();
        const Polarizability alpha = materials.polarizability();
        j["eps"] = {{"model", eps.describe()}, {"fingerprint", hex64(eps.fingerprint())}};
        j["alpha"] = {{"model", alpha.describe()}, {"fingerprint", hex64(alpha.fingerprint())}};
    }
    return j.dump();
}

std::uint64_t RunConfig::hash() const { return Fnv1a{}.str(canonical()).digest(); }

} // namespace cpg
