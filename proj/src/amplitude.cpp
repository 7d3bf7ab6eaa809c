#include "spinbath/amplitude.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Dense>
#include <fmt/format.h>

namespace spinbath {

cplx kernel_eval(const SpectralModel& model, double omega0, double tau, const QuadratureSpec& quad) {
    require(tau >= 0.0, ErrorKind::InvalidArgument, "kernel_eval: tau must be >= 0");
    const double cutoff = effective_cutoff(model, quad);
    if (cutoff == 0.0) return {0.0, 0.0};
    const auto partition = make_partition(0.0, cutoff, model.breakpoints(), tau);
    const cplx integral = integrate_complex(
        [&](double w) { return spectral_density(model, w) * std::polar(1.0, (omega0 - w) * tau); },
        std::span<const double>(partition), quad);
    return -integral;
}

MemoryKernel tabulate_kernel(const SpectralModel& model, double omega0, double t_max, double dt,
                             const QuadratureSpec& quad, Tabulation how) {
    require(dt > 0.0 && t_max >= dt, ErrorKind::InvalidArgument, "tabulate_kernel: requires dt > 0 and t_max >= dt");
    model.validate();
    MemoryKernel kernel{model, omega0, dt, effective_cutoff(model, quad), {}};
    const auto n = static_cast<std::size_t>(std::ceil(t_max / dt - 1e-9));
    kernel.samples.resize(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        const double tau = static_cast<double>(i) * dt;
        std::optional<cplx> closed;
        if (how == Tabulation::Auto) closed = closed_form_transform(model, tau, kernel.cutoff);
        kernel.samples[i] = closed ? -std::polar(1.0, omega0 * tau) * *closed : kernel_eval(model, omega0, tau, quad);
    }
    return kernel;
}

MarkovRates markov_rates(const SpectralModel& model, double omega0, const QuadratureSpec& quad) {
    require(omega0 > 0.0, ErrorKind::InvalidArgument, "markov_rates: omega0 must be > 0");
    const double beta = std::numbers::pi * spectral_density(model, omega0);
    const double cutoff = effective_cutoff(model, quad);
    const auto density = [&](double w) { return spectral_density(model, w); };
    const auto breaks = model.breakpoints();
    double delta = 0.0;
    if (cutoff > omega0) {
        delta = integrate_pv(density, omega0, 0.0, cutoff, quad, breaks);
    } else if (cutoff > 0.0) {
        const auto partition = make_partition(0.0, cutoff, breaks);
        delta = integrate([&](double w) { return density(w) / (omega0 - w); }, std::span<const double>(partition),
                          quad);
    }
    return {beta, delta};
}

cplx markov_amplitude(const MarkovRates& rates, double t) {
    require(t >= 0.0, ErrorKind::InvalidArgument, "markov_amplitude: t must be >= 0");
    return std::exp(-cplx{rates.beta, rates.delta} * t);
}

AmplitudeTrajectory solve_amplitude(const MemoryKernel& kernel) {
    return solve_volterra(std::span<const cplx>(kernel.samples), kernel.dt);
}

AmplitudeTrajectory solve_amplitude(const SpectralModel& model, double omega0, double t_max, double dt,
                                    const QuadratureSpec& quad, Tabulation how) {
    return solve_amplitude(tabulate_kernel(model, omega0, t_max, dt, quad, how));
}

AmplitudeTrajectory solve_mode_oracle(std::span<const double> frequencies, std::span<const double> couplings,
                                      double omega0, double t_max, double dt, std::size_t stride) {
    require(frequencies.size() == couplings.size() && !frequencies.empty(), ErrorKind::InvalidArgument,
            "solve_mode_oracle: need one coupling per mode and at least one mode");
    require(stride >= 1, ErrorKind::InvalidArgument, "solve_mode_oracle: stride must be >= 1");
    require(t_max > 0.0, ErrorKind::InvalidArgument, "solve_mode_oracle: t_max must be > 0");
    const auto n = static_cast<Eigen::Index>(frequencies.size());
    Eigen::VectorXd h(n);
    Eigen::VectorXcd detuning(n);
    double max_detuning = 0.0;
    for (Eigen::Index k = 0; k < n; ++k) {
        h[k] = couplings[static_cast<std::size_t>(k)];
        const double d = omega0 - frequencies[static_cast<std::size_t>(k)];
        detuning[k] = cplx{0.0, d};
        max_detuning = std::max(max_detuning, std::abs(d));
    }
    const auto steps = uniform_steps(t_max, dt);
    require(steps.dt * max_detuning <= 2.5, ErrorKind::StepTooLarge,
            fmt::format("solve_mode_oracle: dt={} does not resolve detuning {}", steps.dt, max_detuning));

    // x = (c, e_1..e_N) with e_k = e^{i(ω₀-ω_k)t} d_k.
    auto rhs = [&](double, const Eigen::VectorXcd& x) {
        Eigen::VectorXcd dx(n + 1);
        const auto modes = x.tail(n);
        dx[0] = -h.dot(modes);
        dx.tail(n) = detuning.cwiseProduct(modes) + h.cast<cplx>() * x[0];
        return dx;
    };

    Eigen::VectorXcd x0 = Eigen::VectorXcd::Zero(n + 1);
    x0[0] = 1.0;
    AmplitudeTrajectory out;
    step_ode(rhs, x0, t_max, dt, [&](std::size_t step, double t, const Eigen::VectorXcd& x) {
        if (step % stride != 0 && step != steps.count) return;
        out.t.push_back(t);
        out.c.push_back(x[0]);
        out.norm_defect.push_back(1.0 - x.squaredNorm());
        if (step == steps.count) {
            out.modes.resize(static_cast<std::size_t>(n));
            for (Eigen::Index k = 0; k < n; ++k) {
                out.modes[static_cast<std::size_t>(k)] = x[k + 1] * std::exp(-detuning[k] * t);
            }
        }
    });
    return out;
}

AmplitudeTrajectory solve_discrete_oracle(const SpectralModel& model, double omega0, std::size_t n_modes,
                                          double t_max, double dt, const QuadratureSpec& quad, std::size_t stride) {
    require(n_modes >= 1, ErrorKind::InvalidArgument, "solve_discrete_oracle: n_modes must be >= 1");
    const double cutoff = effective_cutoff(model, quad);
    const double width = cutoff / static_cast<double>(n_modes);
    std::vector<double> frequencies(n_modes);
    std::vector<double> couplings(n_modes);
    for (std::size_t k = 0; k < n_modes; ++k) {
        frequencies[k] = (static_cast<double>(k) + 0.5) * width;
        couplings[k] = std::sqrt(width * spectral_density(model, frequencies[k]));
    }
    return solve_mode_oracle(frequencies, couplings, omega0, t_max, dt, stride);
}

}  // namespace spinbath
