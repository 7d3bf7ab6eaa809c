#include "spinbath/thermal.hpp"

#include <cmath>
#include <numbers>

#include <fmt/format.h>

namespace spinbath {

void ThermalState::validate() const {
    constants.validate();
    require(std::isfinite(temperature) && temperature >= 0.0, ErrorKind::InvalidArgument,
            "temperature: must be >= 0");
}

double bose_occupation(const ThermalState& thermal, double omega) {
    require(omega >= 0.0, ErrorKind::NegativeFrequency, fmt::format("bose_occupation: omega={} < 0", omega));
    require(omega > 0.0, ErrorKind::ZeroFrequency, "bose_occupation: undefined at omega=0");
    thermal.validate();
    if (thermal.temperature == 0.0) return 0.0;
    const double x = thermal.constants.hbar * omega / (thermal.constants.k_boltzmann * thermal.temperature);
    return 1.0 / std::expm1(x);
}

double golden_rule_rate(const SpectralModel& model, double omega0, const ThermalState& thermal, Direction direction) {
    require(omega0 > 0.0, ErrorKind::InvalidArgument, "golden_rule_rate: omega0 must be > 0");
    const double beta = std::numbers::pi * spectral_density(model, omega0);
    const double occupation = bose_occupation(thermal, omega0);
    return 2.0 * beta * (direction == Direction::Down ? occupation + 1.0 : occupation);
}

TransitionResult golden_rule_probability(const SpectralModel& model, double omega0, const ThermalState& thermal,
                                         Direction direction, double t) {
    require(t >= 0.0, ErrorKind::InvalidArgument, "golden_rule_probability: t must be >= 0");
    const double p = golden_rule_rate(model, omega0, thermal, direction) * t;
    return {p, direction, t, Regime::GoldenRule, p > perturbation_limit};
}

TransitionResult finite_time_probability(const SpectralModel& model, double omega0, const ThermalState& thermal,
                                         Direction direction, double t, const QuadratureSpec& quad) {
    require(omega0 > 0.0, ErrorKind::InvalidArgument, "finite_time_probability: omega0 must be > 0");
    require(t >= 0.0, ErrorKind::InvalidArgument, "finite_time_probability: t must be >= 0");
    thermal.validate();
    TransitionResult result{0.0, direction, t, Regime::FiniteTime, false};
    const double cutoff = effective_cutoff(model, quad);
    if (t == 0.0 || cutoff == 0.0) return result;
    if (direction == Direction::Up && thermal.temperature == 0.0) return result;

    // sin²(u)/((ω-ω₀)/2)² = t² (sin u / u)², u = (ω-ω₀)t/2
    auto window = [&](double w) {
        const double u = 0.5 * (w - omega0) * t;
        const double sinc = std::abs(u) < 1e-4 ? 1.0 - u * u / 6.0 : std::sin(u) / u;
        return t * t * sinc * sinc;
    };
    auto integrand = [&](double w) {
        const double n = bose_occupation(thermal, w);
        return spectral_density(model, w) * window(w) * (direction == Direction::Down ? n + 1.0 : n);
    };
    auto breaks = model.breakpoints();
    breaks.push_back(omega0);
    const auto partition = make_partition(0.0, cutoff, breaks, t);
    result.probability = integrate(integrand, std::span<const double>(partition), quad);
    result.perturbation_breakdown = result.probability > perturbation_limit;
    return result;
}

}  // namespace spinbath
