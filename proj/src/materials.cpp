#include "cpg/materials.hpp"

#include "cpg/constants.hpp"
#include "cpg/errors.hpp"
#include "cpg/hash.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

namespace cpg {

namespace {

// xi * (u - atan u), u = omega / xi. Series below u = 1e-2 where the difference cancels.
double g_term(double omega, double xi) {
    if (xi == 0.0) return omega;
    const double u = omega / xi;
    if (u < 1e-2) {
        const double u2 = u * u;
        return xi * u * u2 * (1.0 / 3.0 - u2 * (1.0 / 5.0 - u2 * (1.0 / 7.0 - u2 / 9.0)));
    }
    return xi * (u - std::atan(u));
}

// int_{wn}^inf wn^3 / (w^2 (w^2 + xi^2)) dw = (1 - atan(y)/y) / y^2 with y = xi / wn.
double high_tail(double y) {
    if (y < 1e-2) {
        const double y2 = y * y;
        return 1.0 / 3.0 - y2 * (1.0 / 5.0 - y2 * (1.0 / 7.0 - y2 / 9.0));
    }
    return (1.0 - std::atan(y) / y) / (y * y);
}

// int_{w1}^{w2} w (y1 + slope (w - w1)) / (w^2 + xi^2) dw, exact for the linear interpolant.
double segment_integral(const LossSample& lo, const LossSample& hi, double xi) {
    const double w1 = lo.omega, w2 = hi.omega;
    const double slope = (hi.im_eps - lo.im_eps) / (w2 - w1);
    const double log_term = 0.5 * std::log1p((w2 - w1) * (w2 + w1) / (w1 * w1 + xi * xi));
    const double dg = g_term(w2, xi) - g_term(w1, xi);
    return lo.im_eps * log_term + slope * (dg - w1 * log_term);
}

double kramers_kronig(const LossTable& table, double xi) {
    const auto& s = table.samples;
    double total = s.front().im_eps / s.front().omega * g_term(s.front().omega, xi);
    for (std::size_t i = 0; i + 1 < s.size(); ++i) total += segment_integral(s[i], s[i + 1], xi);
    total += s.back().im_eps * high_tail(xi / s.back().omega);
    return 1.0 + 2.0 / constants::pi * total;
}

double interpolate_alpha(const PolarizabilityTable& t, double xi) {
    if (xi <= t.xi.front()) return t.alpha.front();
    if (xi >= t.xi.back()) {
        const double r = t.xi.back() / xi;
        return t.alpha.back() * r * r;
    }
    const auto it = std::upper_bound(t.xi.begin(), t.xi.end(), xi);
    const std::size_t i = static_cast<std::size_t>(it - t.xi.begin()) - 1;
    const double f = (xi - t.xi[i]) / (t.xi[i + 1] - t.xi[i]);
    return t.alpha[i] + f * (t.alpha[i + 1] - t.alpha[i]);
}

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
    return s;
}

} // namespace

void validate_loss_samples(const std::vector<LossSample>& samples) {
    if (samples.empty()) throw InputError("loss table is empty");
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const auto& s = samples[i];
        if (!std::isfinite(s.omega) || !std::isfinite(s.im_eps))
            throw InputError("loss table sample " + std::to_string(i) + " is not finite");
        if (s.omega <= 0.0) throw InputError("loss table sample " + std::to_string(i) + " has non-positive frequency");
        if (s.im_eps < 0.0) throw InputError("loss table sample " + std::to_string(i) + " has negative Im eps");
        if (i > 0 && s.omega <= samples[i - 1].omega)
            throw InputError("loss table is not sorted by strictly increasing frequency at sample " + std::to_string(i));
    }
}

DielectricFunction DielectricFunction::lorentz(double eps_static, double eps_inf, double omega0) {
    if (!(eps_inf >= 1.0) || !(eps_static >= eps_inf))
        throw InputError("Lorentz permittivity requires eps_static >= eps_inf >= 1");
    if (!(omega0 > 0.0)) throw InputError("Lorentz resonance frequency must be positive");
    return DielectricFunction(LorentzModel{eps_static, eps_inf, omega0});
}

DielectricFunction DielectricFunction::tabulated(std::vector<LossSample> samples) {
    validate_loss_samples(samples);
    return DielectricFunction(LossTable{std::move(samples)});
}

double DielectricFunction::operator()(double xi) const {
    if (!(xi >= 0.0)) throw InputError("eps(i xi) requires xi >= 0");
    if (const auto* m = std::get_if<LorentzModel>(&model_)) {
        const double r = xi / m->omega0;
        return m->eps_inf + (m->eps_static - m->eps_inf) / (1.0 + r * r);
    }
    return kramers_kronig(std::get<LossTable>(model_), xi);
}

std::uint64_t DielectricFunction::fingerprint() const {
    Fnv1a h;
    if (const auto* m = std::get_if<LorentzModel>(&model_)) {
        h.str("lorentz").f64(m->eps_static).f64(m->eps_inf).f64(m->omega0);
    } else {
        const auto& t = std::get<LossTable>(model_);
        h.str("loss-table").u64(t.samples.size());
        for (const auto& s : t.samples) h.f64(s.omega).f64(s.im_eps);
    }
    return h.digest();
}

std::string DielectricFunction::describe() const {
    std::ostringstream os;
    os.precision(17);
    if (const auto* m = std::get_if<LorentzModel>(&model_)) {
        os << "lorentz(eps_static=" << m->eps_static << ", eps_inf=" << m->eps_inf << ", omega0=" << m->omega0 << ")";
    } else {
        os << "kramers-kronig(" << std::get<LossTable>(model_).samples.size() << " samples)";
    }
    return os.str();
}

Polarizability Polarizability::oscillator(double alpha_static, double omega_a) {
    if (!(alpha_static >= 0.0)) throw InputError("static polarizability must be non-negative");
    if (!(omega_a > 0.0)) throw InputError("atomic resonance frequency must be positive");
    return Polarizability(OscillatorModel{alpha_static, omega_a});
}

Polarizability Polarizability::tabulated(std::vector<double> xi, std::vector<double> alpha) {
    if (xi.empty() || xi.size() != alpha.size()) throw InputError("polarizability table is empty or ragged");
    for (std::size_t i = 0; i < xi.size(); ++i) {
        if (!(xi[i] >= 0.0) || !(alpha[i] >= 0.0))
            throw InputError("polarizability table entry " + std::to_string(i) + " is negative");
        if (i > 0 && !(xi[i] > xi[i - 1]))
            throw InputError("polarizability table is not sorted at entry " + std::to_string(i));
        if (i > 0 && alpha[i] > alpha[i - 1])
            throw InputError("polarizability table increases at entry " + std::to_string(i));
    }
    return Polarizability(PolarizabilityTable{std::move(xi), std::move(alpha)});
}

double Polarizability::operator()(double xi) const {
    if (!(xi >= 0.0)) throw InputError("alpha(i xi) requires xi >= 0");
    if (const auto* m = std::get_if<OscillatorModel>(&model_)) {
        const double r = xi / m->omega_a;
        return m->alpha_static / (1.0 + r * r);
    }
    return interpolate_alpha(std::get<PolarizabilityTable>(model_), xi);
}

std::uint64_t Polarizability::fingerprint() const {
    Fnv1a h;
    if (const auto* m = std::get_if<OscillatorModel>(&model_)) {
        h.str("oscillator").f64(m->alpha_static).f64(m->omega_a);
    } else {
        const auto& t = std::get<PolarizabilityTable>(model_);
        h.str("alpha-table").u64(t.xi.size());
        for (std::size_t i = 0; i < t.xi.size(); ++i) h.f64(t.xi[i]).f64(t.alpha[i]);
    }
    return h.digest();
}

std::string Polarizability::describe() const {
    std::ostringstream os;
    os.precision(17);
    if (const auto* m = std::get_if<OscillatorModel>(&model_)) {
        os << "oscillator(alpha_static=" << m->alpha_static << ", omega_a=" << m->omega_a << ")";
    } else {
        os << "table(" << std::get<PolarizabilityTable>(model_).xi.size() << " samples)";
    }
    return os.str();
}

double eps_imag_freq(const DielectricFunction& df, double xi) { return df(xi); }
double alpha_imag_freq(const Polarizability& p, double xi) { return p(xi); }

double polarizability_from_au(double alpha_au) { return alpha_au * constants::au_polarizability; }
double polarizability_to_au(double alpha_si) { return alpha_si / constants::au_polarizability; }

std::vector<LossSample> read_loss_table(std::istream& in, FrequencyUnit unit) {
    std::vector<LossSample> out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty()) continue;
        if (t[0] == '#') {
            const std::string body = lower(trim(t.substr(1)));
            if (body.rfind("units:", 0) == 0) {
                const std::string u = trim(body.substr(6));
                if (u == "ev") unit = FrequencyUnit::electron_volt;
                else if (u == "rad/s") unit = FrequencyUnit::rad_per_s;
                else throw InputError("line " + std::to_string(lineno) + ": unknown frequency unit '" + u + "'");
            }
            continue;
        }
        std::istringstream row(t);
        double w = 0.0, im = 0.0;
        std::string extra;
        if (!(row >> w >> im) || (row >> extra))
            throw InputError("line " + std::to_string(lineno) + ": expected two numeric columns");
        if (unit == FrequencyUnit::electron_volt) w *= constants::ev_to_rad_per_s;
        out.push_back({w, im});
    }
    if (out.empty()) throw InputError("line " + std::to_string(lineno) + ": loss table has no data rows");
    try {
        validate_loss_samples(out);
    } catch (const InputError& e) {
        throw InputError(std::string("loss table: ") + e.what());
    }
    return out;
}

std::vector<LossSample> read_loss_table_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open loss table '" + path + "'");
    return read_loss_table(in);
}

namespace presets {

DielectricFunction silicon() { return DielectricFunction::lorentz(si_eps_static, si_eps_inf, si_omega0); }

Polarizability rubidium() {
    return Polarizability::oscillator(polarizability_from_au(rb_alpha_static_au),
                                      2.0 * constants::pi * constants::c / rb_resonance_wavelength);
}

} // namespace presets

} // namespace cpg
