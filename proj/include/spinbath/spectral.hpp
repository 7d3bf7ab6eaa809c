// spectral.hpp: parametric spectral densities J(ω) and the coupling
// magnitude |f(ω)| they induce, J(ω) = (2π/c³) ω² |f(ω)|².

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "spinbath/numerics.hpp"

namespace spinbath {

struct PhysicalConstants {
    double hbar = 1.0;
    double c = 1.0;
    double k_boltzmann = 1.0;

    void validate() const;
};

/// J(ω) = α ω^s ω_c^(1-s) exp(-ω/ω_c)
struct Ohmic {
    double alpha;
    double s;
    double omega_c;
};

/// J(ω) = α γ₀ ω / ((ω² - ω_r²)² + γ₀² ω²)
struct Lorentzian {
    double alpha;
    double omega_r;
    double gamma0;
};

/// J(ω) = J₀ on [lo, hi], zero elsewhere.
struct FlatWindow {
    double j0;
    double lo;
    double hi;
};

struct NullCoupling {};

struct SpectralModel {
    std::variant<NullCoupling, Ohmic, Lorentzian, FlatWindow> kind{NullCoupling{}};
    PhysicalConstants constants{};

    static SpectralModel null();
    static SpectralModel ohmic(double alpha, double s, double omega_c);
    static SpectralModel lorentzian(double alpha, double omega_r, double gamma0);
    static SpectralModel flat(double j0, double lo, double hi);

    /// Throws InvalidArgument naming the first violated parameter.
    void validate() const;
    [[nodiscard]] bool is_null() const;
    /// Frequencies where J is not smooth; quadratures split there.
    [[nodiscard]] std::vector<double> breakpoints() const;
    /// Canonical one-line form, e.g. "ohmic alpha=0.1 s=1 omega_c=10".
    [[nodiscard]] std::string describe() const;
};

/// Parses the one-line grammar shared with the scenario files:
///   ohmic alpha=<f> s=<f> omega_c=<f>
///   lorentzian alpha=<f> omega_r=<f> gamma0=<f>
///   flat j0=<f> lo=<f> hi=<f>
///   null
/// Errors are ErrorKind::Config with the offending key in the message.
[[nodiscard]] SpectralModel parse_model(std::string_view text);

[[nodiscard]] double spectral_density(const SpectralModel& model, double omega);

/// |f(ω)| = sqrt(c³ J(ω) / (2π ω²)); defined for ω > 0 only.
[[nodiscard]] double coupling_magnitude(const SpectralModel& model, double omega);

/// A frequency Ω with ∫_Ω^∞ J(ω) dω < abs_tol.
[[nodiscard]] double tail_cutoff(const SpectralModel& model, double abs_tol);

/// Upper limit actually used for ∫_0^∞ J(ω)…: the smaller of the model tail
/// cutoff at quad.abs_tol and quad.upper_cutoff.
[[nodiscard]] double effective_cutoff(const SpectralModel& model, const QuadratureSpec& quad);

/// Closed form of ∫_0^cutoff J(ω) e^{-iωτ} dω when the model admits one
/// (null, flat window, ohmic with integer s); nullopt otherwise.
[[nodiscard]] std::optional<cplx> closed_form_transform(const SpectralModel& model, double tau, double cutoff);

/// How kernel-type tables (memory kernel, χ(t)) are filled: Auto uses the
/// closed form when the model has one and falls back to quadrature.
enum class Tabulation { Auto, Quadrature };

}  // namespace spinbath
