// response.hpp: linear response of the absorbing environment.
//
//   χ(t)   = (4/ℏ) ∫_0^∞ J(ω) sin(ωt) dω · Θ(t)
//   χ̃_ε(ω) = (4/ℏ) ∫_0^∞ J(ω') ω' / (ω'² - (ω + iε)²) dω'
//
// χ̃_ε is the exact Fourier transform of χ(t) e^{-εt}; as ε → 0⁺ and ω > 0,
// Im χ̃_ε(ω) → (2π/ℏ) J(ω).

#pragma once

#include <vector>

#include "spinbath/numerics.hpp"
#include "spinbath/spectral.hpp"

namespace spinbath {

struct SusceptibilitySample {
    double t;
    double value;
};

struct SusceptibilitySpectrum {
    std::vector<double> omega;
    std::vector<cplx> values;
    double epsilon;
};

/// Exactly zero for t <= 0.
[[nodiscard]] double chi_time(const SpectralModel& model, double t, const QuadratureSpec& quad = {});

[[nodiscard]] double chi_time(const SpectralModel& model, double t, const QuadratureSpec& quad, Tabulation how);

[[nodiscard]] cplx chi_freq(const SpectralModel& model, double omega, double epsilon, const QuadratureSpec& quad = {});

[[nodiscard]] std::vector<SusceptibilitySample> chi_time_table(const SpectralModel& model, const GridSpec& grid,
                                                               const QuadratureSpec& quad = {});

[[nodiscard]] SusceptibilitySpectrum chi_freq_table(const SpectralModel& model, const GridSpec& grid, double epsilon,
                                                    const QuadratureSpec& quad = {});

/// Im χ̃_ε(ω) sampled at each epsilon and extrapolated to ε → 0.
[[nodiscard]] double im_chi_limit(const SpectralModel& model, double omega, std::span<const double> epsilons,
                                  const QuadratureSpec& quad = {});

enum class KKDirection {
    RealFromImag,  // Re χ̃(ω) = (2/π) P∫ ω' Im χ̃(ω') / (ω'² - ω²) dω'
    ImagFromReal,  // Im χ̃(ω) = -(2ω/π) P∫ Re χ̃(ω') / (ω'² - ω²) dω'
};

struct KKPoint {
    double omega;
    double direct;
    double reconstructed;
    double relative_error;
};

struct KKReport {
    std::vector<KKPoint> points;
    double residual;  // max relative_error over the grid
};

/// Default floor under |direct| in the relative residual.
inline constexpr double kk_default_floor = 1e-6;

[[nodiscard]] KKReport kk_check(const SpectralModel& model, const GridSpec& grid, double epsilon,
                                const QuadratureSpec& quad = {}, KKDirection direction = KKDirection::RealFromImag,
                                double floor = kk_default_floor);

[[nodiscard]] double kk_residual(const SpectralModel& model, const GridSpec& grid, double epsilon,
                                 const QuadratureSpec& quad = {}, KKDirection direction = KKDirection::RealFromImag,
                                 double floor = kk_default_floor);

}  // namespace spinbath
