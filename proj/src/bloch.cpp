#include "spinbath/bloch.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Geometry>
#include <fmt/format.h>

#include "spinbath/response.hpp"

namespace spinbath {

namespace {

double characteristic_frequency(const SpectralModel& model) {
    if (const auto* o = std::get_if<Ohmic>(&model.kind)) return o->omega_c;
    if (const auto* l = std::get_if<Lorentzian>(&model.kind)) return std::max(l->omega_r, l->gamma0);
    if (const auto* f = std::get_if<FlatWindow>(&model.kind)) return f->hi;
    return 0.0;
}

}  // namespace

BlochRhs::BlochRhs(double omega0, const Vec3& axis, std::vector<double> chi_half, double h)
    : omega0_(omega0), axis_(axis), chi_half_(std::move(chi_half)), h_(h) {
    require(h > 0.0, ErrorKind::InvalidArgument, "BlochRhs: step must be > 0");
    require(!chi_half_.empty(), ErrorKind::InvalidArgument, "BlochRhs: empty susceptibility table");
}

void BlochRhs::accept(const Vec3& S) { history_.push_back(S); }

Vec3 BlochRhs::memory(double t) const {
    require(!history_.empty(), ErrorKind::InvalidArgument, "BlochRhs: no accepted state yet");
    const std::size_t n = history_.size() - 1;
    const double offset = (t - static_cast<double>(n) * h_) / (0.5 * h_);
    const auto off = static_cast<long>(std::lround(offset));
    require(off >= 0 && off <= 2 && std::abs(offset - static_cast<double>(off)) < 1e-6, ErrorKind::InvalidArgument,
            fmt::format("BlochRhs: t={} is not a stage time of step {}", t, n));
    const std::size_t m = 2 * n + static_cast<std::size_t>(off);
    require(m < chi_half_.size(), ErrorKind::InvalidArgument, "BlochRhs: susceptibility table too short");

    Vec3 M = Vec3::Zero();
    if (n > 0) {
        M += 0.5 * chi_half_[m] * history_[0];
        for (std::size_t j = 1; j < n; ++j) M += chi_half_[m - 2 * j] * history_[j];
        M += 0.5 * chi_half_[m - 2 * n] * history_[n];
        M *= h_;
    }
    // Partial step [n·h, t]; χ(0) = 0 removes the stage-state endpoint.
    const double partial = 0.5 * h_ * static_cast<double>(off);
    M += 0.5 * partial * chi_half_[static_cast<std::size_t>(off)] * history_[n];
    return M;
}

Vec3 BlochRhs::operator()(double t, const Vec3& S) const {
    const Vec3 field = omega0_ * axis_ - memory(t);
    return field.cross(S);
}

BlochTrajectory simulate_bloch(const SpectralModel& model, double omega0, const Vec3& axis, const Vec3& S0,
                               double t_max, double dt, const QuadratureSpec& quad, Tabulation how) {
    require(std::abs(axis.norm() - 1.0) < 1e-12, ErrorKind::InvalidArgument, "simulate_bloch: axis must be a unit vector");
    require(S0.allFinite(), ErrorKind::NonFiniteState, "simulate_bloch: S0 must be finite");
    require(t_max > 0.0 && dt > 0.0, ErrorKind::InvalidArgument, "simulate_bloch: requires t_max > 0 and dt > 0");
    model.validate();
    const auto steps = uniform_steps(t_max, dt);
    const double h = steps.dt;
    const double fastest = std::max(std::abs(omega0), characteristic_frequency(model));
    require(h * fastest <= 0.5, ErrorKind::StepTooLarge,
            fmt::format("simulate_bloch: dt={} does not resolve frequency {}", h, fastest));

    std::vector<double> chi_half(2 * steps.count + 1);
    for (std::size_t k = 0; k < chi_half.size(); ++k) {
        chi_half[k] = chi_time(model, 0.5 * h * static_cast<double>(k), quad, how);
    }
    BlochRhs rhs(omega0, axis, std::move(chi_half), h);

    BlochTrajectory out;
    const double norm0 = S0.norm();
    step_ode(
        [&rhs](double t, const Vec3& S) { return rhs(t, S); }, Vec3(S0), t_max, dt,
        [&](std::size_t, double t, const Vec3& S) {
            rhs.accept(S);
            out.t.push_back(t);
            out.S.push_back(S);
            out.norm_drift.push_back(S.norm() - norm0);
        });
    return out;
}

}  // namespace spinbath
