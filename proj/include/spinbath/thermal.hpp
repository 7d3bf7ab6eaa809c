// thermal.hpp: first-order transition probabilities between the spin
// eigenstates with the oscillator bath in a thermal state.

#pragma once

#include "spinbath/numerics.hpp"
#include "spinbath/spectral.hpp"

namespace spinbath {

struct ThermalState {
    double temperature = 0.0;
    PhysicalConstants constants{};

    void validate() const;
};

enum class Direction {
    Down,  // +ℏω₀/2 → -ℏω₀/2 (emission)
    Up,    // -ℏω₀/2 → +ℏω₀/2 (absorption)
};

enum class Regime { FiniteTime, GoldenRule };

/// Probabilities above this leave the first-order regime.
inline constexpr double perturbation_limit = 0.1;

struct TransitionResult {
    double probability;
    Direction direction;
    double t;
    Regime regime;
    bool perturbation_breakdown;
};

/// n̄(ω) = 1/(e^{ℏω/KT} - 1); exactly 0 at T = 0.
[[nodiscard]] double bose_occupation(const ThermalState& thermal, double omega);

/// Long-time transition probability per unit time: 2β(n̄+1) down, 2β n̄ up,
/// with β = πJ(ω₀).
[[nodiscard]] double golden_rule_rate(const SpectralModel& model, double omega0, const ThermalState& thermal,
                                      Direction direction);

[[nodiscard]] TransitionResult golden_rule_probability(const SpectralModel& model, double omega0,
                                                       const ThermalState& thermal, Direction direction, double t);

/// P(t) = ∫ J(ω) sin²((ω-ω₀)t/2) / ((ω-ω₀)/2)² · (n̄(ω) + 1 or n̄(ω)) dω.
[[nodiscard]] TransitionResult finite_time_probability(const SpectralModel& model, double omega0,
                                                       const ThermalState& thermal, Direction direction, double t,
                                                       const QuadratureSpec& quad = {});

}  // namespace spinbath
