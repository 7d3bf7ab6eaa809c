// bloch.hpp: mean-field spin dynamics with environmental memory,
//
//   dS/dt = ω₀ (n̂ × S) - M(t) × S,   M(t) = ∫_0^t χ(t-t') S(t') dt',
//
// i.e. the expectation-value shadow of the spin Langevin equation with the
// bath noise replaced by its vanishing vacuum mean. Only t >= 0 is evolved.

#pragma once

#include <vector>

#include <Eigen/Core>

#include "spinbath/numerics.hpp"
#include "spinbath/spectral.hpp"

namespace spinbath {

using Vec3 = Eigen::Vector3d;

struct BlochState {
    Vec3 S;
    double t;
};

struct BlochTrajectory {
    std::vector<double> t;
    std::vector<Vec3> S;
    std::vector<double> norm_drift;  // |S(t)| - |S(0)|
};

/// Right-hand side of the memory equation on a fixed step h. χ must be
/// tabulated on the half-step grid, chi_half[k] = χ(k·h/2), and the history
/// must hold every accepted state S(0), S(h), …, S(n·h). Stage times are
/// n·h, n·h + h/2 and (n+1)·h.
class BlochRhs {
public:
    BlochRhs(double omega0, const Vec3& axis, std::vector<double> chi_half, double h);

    [[nodiscard]] Vec3 operator()(double t, const Vec3& S) const;
    /// M(t) by product-trapezoid over the stored history plus the partial
    /// step up to t.
    [[nodiscard]] Vec3 memory(double t) const;
    void accept(const Vec3& S);
    [[nodiscard]] const std::vector<Vec3>& history() const { return history_; }

private:
    double omega0_;
    Vec3 axis_;
    std::vector<double> chi_half_;
    double h_;
    std::vector<Vec3> history_;
};

[[nodiscard]] BlochTrajectory simulate_bloch(const SpectralModel& model, double omega0, const Vec3& axis,
                                             const Vec3& S0, double t_max, double dt, const QuadratureSpec& quad = {},
                                             Tabulation how = Tabulation::Auto);

}  // namespace spinbath
