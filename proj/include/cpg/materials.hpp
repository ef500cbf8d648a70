#pragma once

#include <cstdint>
#include <istream>
#include <string>
#include <variant>
#include <vector>

namespace cpg {

/// One real-frequency sample of the dielectric loss: (omega [rad/s], Im eps(omega)).
struct LossSample {
    double omega;
    double im_eps;
};

/// Single Lorentz-type oscillator evaluated directly on the imaginary axis:
///   eps(i xi) = eps_inf + (eps_static - eps_inf) / (1 + xi^2 / omega0^2)
struct LorentzModel {
    double eps_static;
    double eps_inf;
    double omega0; // rad/s
};

/// Real-frequency loss data continued to the imaginary axis by a Kramers-Kronig integral:
///   eps(i xi) = 1 + (2/pi) int_0^inf omega Im eps(omega) / (omega^2 + xi^2) d omega
///
/// Im eps is interpolated linearly between samples and the integral of the interpolant is
/// taken in closed form segment by segment. Below the first sample Im eps is continued
/// proportional to omega, above the last sample proportional to omega^-3.
struct LossTable {
    std::vector<LossSample> samples;
};

/// Permittivity of the grating medium as a function of imaginary frequency.
class DielectricFunction {
public:
    static DielectricFunction lorentz(double eps_static, double eps_inf, double omega0);
    static DielectricFunction tabulated(std::vector<LossSample> samples);
    static DielectricFunction constant(double eps) { return lorentz(eps, eps, 1.0); }

    /// eps(i xi); xi >= 0.
    double operator()(double xi) const;

    bool is_tabulated() const noexcept { return std::holds_alternative<LossTable>(model_); }
    const LorentzModel* lorentz_model() const noexcept { return std::get_if<LorentzModel>(&model_); }
    const LossTable* loss_table() const noexcept { return std::get_if<LossTable>(&model_); }

    /// Stable 64-bit digest of the model parameters, used in cache keys and manifests.
    std::uint64_t fingerprint() const;
    std::string describe() const;

private:
    explicit DielectricFunction(std::variant<LorentzModel, LossTable> m) : model_(std::move(m)) {}
    std::variant<LorentzModel, LossTable> model_;
};

struct OscillatorModel {
    double alpha_static; // C m^2 / V
    double omega_a;      // rad/s
};

/// Sampled alpha(i xi). Interpolated linearly (preserving monotonicity), held constant
/// below the first node and continued as xi^-2 beyond the last one.
struct PolarizabilityTable {
    std::vector<double> xi;
    std::vector<double> alpha;
};

/// Dynamic ground-state polarizability of the atom on the imaginary axis.
class Polarizability {
public:
    static Polarizability oscillator(double alpha_static, double omega_a);
    static Polarizability tabulated(std::vector<double> xi, std::vector<double> alpha);
    static Polarizability zero() { return oscillator(0.0, 1.0); }

    double operator()(double xi) const;
    double static_value() const { return (*this)(0.0); }

    std::uint64_t fingerprint() const;
    std::string describe() const;

private:
    explicit Polarizability(std::variant<OscillatorModel, PolarizabilityTable> m) : model_(std::move(m)) {}
    std::variant<OscillatorModel, PolarizabilityTable> model_;
};

double eps_imag_freq(const DielectricFunction& df, double xi);
double alpha_imag_freq(const Polarizability& p, double xi);

/// Atomic units of polarizability <-> SI (C m^2 / V).
double polarizability_from_au(double alpha_au);
double polarizability_to_au(double alpha_si);

enum class FrequencyUnit { rad_per_s, electron_volt };

/// Reads a two-column loss table. Lines starting with '#' are comments; a comment of the
/// form "# units: eV" (or "rad/s") selects the unit of the first column. Throws InputError
/// with the offending line number on malformed input.
std::vector<LossSample> read_loss_table(std::istream& in, FrequencyUnit default_unit = FrequencyUnit::rad_per_s);
std::vector<LossSample> read_loss_table_file(const std::string& path);

/// Validates ordering and sign of loss samples; throws InputError.
void validate_loss_samples(const std::vector<LossSample>& samples);

/// Parameter presets for the Rb / Si system. These are defaults for configs only.
namespace presets {
inline constexpr double si_eps_static = 11.87;
inline constexpr double si_eps_inf = 1.035;
inline constexpr double si_omega0 = 6.6e15;
inline constexpr double rb_alpha_static_au = 318.8;
inline constexpr double rb_resonance_wavelength = 795e-9;

DielectricFunction silicon();
Polarizability rubidium();
} // namespace presets

} // namespace cpg
