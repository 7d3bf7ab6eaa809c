// amplitude.hpp: decay of an initially excited spin into the oscillator
// continuum (single-excitation sector, rotating-wave approximation).
//
// The upper-state amplitude obeys dc/dt = ∫_0^t γ(t-t') c(t') dt' with
//   γ(τ) = -∫_0^∞ J(ω) e^{i(ω₀-ω)τ} dω.
// In the Markov limit c(t) = exp(-(β + iΔ)t), β = πJ(ω₀) and
// Δ = P∫ J(ω)/(ω₀-ω) dω. Comparisons with the Markov form are meaningful for
// t up to a few 1/β; the exact solution is reported for every t.

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "spinbath/numerics.hpp"
#include "spinbath/spectral.hpp"

namespace spinbath {

/// γ(n·dt) for n = 0..N. Reusing one table across solves avoids
/// re-tabulating the kernel for a fixed (model, ω₀, dt).
struct MemoryKernel {
    SpectralModel model;
    double omega0;
    double dt;
    double cutoff;
    std::vector<cplx> samples;
};

struct MarkovRates {
    double beta;
    double delta;
};

[[nodiscard]] cplx kernel_eval(const SpectralModel& model, double omega0, double tau, const QuadratureSpec& quad = {});

[[nodiscard]] MemoryKernel tabulate_kernel(const SpectralModel& model, double omega0, double t_max, double dt,
                                           const QuadratureSpec& quad = {}, Tabulation how = Tabulation::Auto);

[[nodiscard]] MarkovRates markov_rates(const SpectralModel& model, double omega0, const QuadratureSpec& quad = {});

[[nodiscard]] cplx markov_amplitude(const MarkovRates& rates, double t);

[[nodiscard]] AmplitudeTrajectory solve_amplitude(const MemoryKernel& kernel);

[[nodiscard]] AmplitudeTrajectory solve_amplitude(const SpectralModel& model, double omega0, double t_max, double dt,
                                                  const QuadratureSpec& quad = {}, Tabulation how = Tabulation::Auto);

/// Explicit modes ω_k with couplings h_k: integrates
///   dc/dt = -Σ h_k e^{i(ω₀-ω_k)t} d_k,   dd_k/dt = h_k e^{-i(ω₀-ω_k)t} c
/// from c(0) = 1, d_k(0) = 0 with RK4. The phases are absorbed into the mode
/// amplitudes, which leaves an autonomous linear system with the same |c|
/// and |d_k|. Samples every `stride` steps (the last step is always kept).
[[nodiscard]] AmplitudeTrajectory solve_mode_oracle(std::span<const double> frequencies,
                                                    std::span<const double> couplings, double omega0, double t_max,
                                                    double dt, std::size_t stride = 1);

/// Midpoint discretisation of [0, cutoff] into n_modes modes with
/// h_k = sqrt(w_k J(ω_k)); cutoff is effective_cutoff(model, quad).
[[nodiscard]] AmplitudeTrajectory solve_discrete_oracle(const SpectralModel& model, double omega0,
                                                        std::size_t n_modes, double t_max, double dt,
                                                        const QuadratureSpec& quad = {}, std::size_t stride = 1);

}  // namespace spinbath
