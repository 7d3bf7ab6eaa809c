#include "spinbath/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace spinbath {

void QuadratureSpec::validate() const {
    require(abs_tol > 0.0, ErrorKind::InvalidArgument, "abs_tol: must be > 0");
    require(rel_tol > 0.0, ErrorKind::InvalidArgument, "rel_tol: must be > 0");
    require(max_subdivisions >= 1, ErrorKind::InvalidArgument, "max_subdivisions: must be >= 1");
    require(upper_cutoff > 0.0, ErrorKind::InvalidArgument, "upper_cutoff: must be > 0");
}

void GridSpec::validate() const {
    require(std::isfinite(start) && std::isfinite(stop), ErrorKind::InvalidArgument, "grid: bounds must be finite");
    require(stop > start, ErrorKind::InvalidArgument, "grid: stop must be > start");
    require(n_points >= 2, ErrorKind::InvalidArgument, "grid: n_points must be >= 2");
}

double GridSpec::at(std::size_t i) const {
    if (i + 1 == n_points) return stop;
    return start + (stop - start) * static_cast<double>(i) / static_cast<double>(n_points - 1);
}

std::vector<double> GridSpec::points() const {
    validate();
    std::vector<double> out(n_points);
    for (std::size_t i = 0; i < n_points; ++i) out[i] = at(i);
    return out;
}

UniformSteps uniform_steps(double t_max, double dt) {
    require(dt > 0.0 && t_max > 0.0, ErrorKind::InvalidArgument, "uniform_steps: requires dt > 0 and t_max > 0");
    const auto count = static_cast<std::size_t>(std::max(1.0, std::ceil(t_max / dt - 1e-9)));
    return {count, t_max / static_cast<double>(count)};
}

std::vector<double> make_partition(double a, double b, std::span<const double> interior, double frequency,
                                   std::size_t max_panels) {
    require(a <= b, ErrorKind::InvalidArgument, "make_partition: requires a <= b");
    std::vector<double> pts{a, b};
    for (double x : interior) {
        if (x > a && x < b) pts.push_back(x);
    }
    if (frequency != 0.0 && b > a && max_panels > 1) {
        const double half_period = std::numbers::pi / std::abs(frequency);
        const double width = std::max(half_period, (b - a) / static_cast<double>(max_panels));
        const auto panels = static_cast<std::size_t>(std::ceil((b - a) / width));
        for (std::size_t i = 1; i < panels; ++i) pts.push_back(a + (b - a) * static_cast<double>(i) / static_cast<double>(panels));
    }
    // Decades past the last feature, so a slowly decaying tail on a long
    // interval does not hide the structure near its left end.
    double anchor = 0.0;
    for (double x : pts) {
        if (x < b) anchor = std::max(anchor, x);
    }
    if (anchor <= 0.0) anchor = 1.0;
    for (double x = 10.0 * anchor; x < b; x *= 10.0) {
        if (x > a) pts.push_back(x);
    }
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
}

double extrapolate_to_zero(std::span<const double> x, std::span<const double> y) {
    require(x.size() == y.size() && !x.empty(), ErrorKind::InvalidArgument,
            "extrapolate_to_zero: need matching, non-empty samples");
    std::vector<double> p(y.begin(), y.end());
    const std::size_t n = x.size();
    for (std::size_t level = 1; level < n; ++level) {
        for (std::size_t i = 0; i + level < n; ++i) {
            const double denom = x[i] - x[i + level];
            require(denom != 0.0, ErrorKind::InvalidArgument, "extrapolate_to_zero: duplicate abscissae");
            p[i] = (x[i] * p[i + 1] - x[i + level] * p[i]) / denom;
        }
    }
    return p[0];
}

AmplitudeTrajectory solve_volterra(std::span<const cplx> kernel, double dt, double growth_tolerance) {
    require(dt > 0.0, ErrorKind::InvalidArgument, "solve_volterra: dt must be > 0");
    require(kernel.size() >= 2, ErrorKind::InvalidArgument, "solve_volterra: need at least two kernel samples");
    for (const cplx& k : kernel) {
        require(detail::finite_value(k), ErrorKind::InvalidArgument, "solve_volterra: kernel must be finite");
    }
    const std::size_t n_max = kernel.size() - 1;
    const bool dissipative = kernel[0].real() <= 0.0;
    const cplx implicit = 1.0 - 0.25 * dt * dt * kernel[0];

    AmplitudeTrajectory out;
    out.t.resize(n_max + 1);
    out.c.resize(n_max + 1);
    out.c[0] = 1.0;
    out.t[0] = 0.0;
    cplx force = 0.0;  // dc/dt at the current node

    for (std::size_t n = 0; n < n_max; ++n) {
        const std::size_t m = n + 1;
        // History part of the memory integral at t_m, excluding the c_m node.
        double re = 0.5 * (kernel[m].real() * out.c[0].real() - kernel[m].imag() * out.c[0].imag());
        double im = 0.5 * (kernel[m].real() * out.c[0].imag() + kernel[m].imag() * out.c[0].real());
        for (std::size_t j = 1; j <= n; ++j) {
            const cplx& k = kernel[m - j];
            const cplx& c = out.c[j];
            re += k.real() * c.real() - k.imag() * c.imag();
            im += k.real() * c.imag() + k.imag() * c.real();
        }
        const cplx history{dt * re, dt * im};
        const cplx next = (out.c[n] + 0.5 * dt * (force + history)) / implicit;
        if (!detail::finite_value(next)) {
            fail(ErrorKind::StepTooLarge, "solve_volterra: non-finite amplitude at step " + std::to_string(m));
        }
        if (dissipative && std::abs(next) > 1.0 + growth_tolerance) {
            fail(ErrorKind::StepTooLarge, "solve_volterra: |c| = " + std::to_string(std::abs(next)) +
                                              " exceeds 1 at t=" + std::to_string(static_cast<double>(m) * dt) +
                                              "; reduce dt");
        }
        out.c[m] = next;
        out.t[m] = static_cast<double>(m) * dt;
        force = history + 0.5 * dt * kernel[0] * next;
    }
    return out;
}

}  // namespace spinbath
