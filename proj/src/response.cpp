#include "spinbath/response.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

namespace spinbath {

namespace {

// Points bracketing the near-pole structure of width ε around x0.
void add_pole_points(std::vector<double>& pts, double x0, double epsilon) {
    pts.push_back(x0);
    for (double k : {1.0, 10.0, 100.0}) {
        pts.push_back(x0 - k * epsilon);
        pts.push_back(x0 + k * epsilon);
    }
}

}  // namespace

double chi_time(const SpectralModel& model, double t, const QuadratureSpec& quad) {
    return chi_time(model, t, quad, Tabulation::Quadrature);
}

double chi_time(const SpectralModel& model, double t, const QuadratureSpec& quad, Tabulation how) {
    if (t <= 0.0) return 0.0;
    const double cutoff = effective_cutoff(model, quad);
    if (cutoff == 0.0) return 0.0;
    const double scale = 4.0 / model.constants.hbar;
    if (how == Tabulation::Auto) {
        if (const auto f = closed_form_transform(model, t, cutoff)) return -scale * f->imag();
    }
    const auto breaks = model.breakpoints();
    const auto partition = make_partition(0.0, cutoff, breaks, t);
    return scale * integrate([&](double w) { return spectral_density(model, w) * std::sin(w * t); },
                             std::span<const double>(partition), quad);
}

cplx chi_freq(const SpectralModel& model, double omega, double epsilon, const QuadratureSpec& quad) {
    require(epsilon > 0.0, ErrorKind::InvalidArgument, "chi_freq: epsilon must be > 0");
    require(std::isfinite(omega), ErrorKind::InvalidArgument, "chi_freq: omega must be finite");
    const double cutoff = effective_cutoff(model, quad);
    if (cutoff == 0.0) return {0.0, 0.0};
    const cplx z{omega, epsilon};
    const cplx z2 = z * z;
    const double scale = 4.0 / model.constants.hbar;
    std::vector<double> pts = model.breakpoints();
    add_pole_points(pts, std::abs(omega), epsilon);
    const auto partition = make_partition(0.0, cutoff, pts);
    return scale * integrate_complex([&](double x) { return spectral_density(model, x) * x / (x * x - z2); },
                                     std::span<const double>(partition), quad);
}

std::vector<SusceptibilitySample> chi_time_table(const SpectralModel& model, const GridSpec& grid,
                                                 const QuadratureSpec& quad) {
    grid.validate();
    const auto ts = grid.points();
    return parallel_map(ts.size(), [&](std::size_t i) { return SusceptibilitySample{ts[i], chi_time(model, ts[i], quad)}; });
}

SusceptibilitySpectrum chi_freq_table(const SpectralModel& model, const GridSpec& grid, double epsilon,
                                      const QuadratureSpec& quad) {
    grid.validate();
    SusceptibilitySpectrum out{grid.points(), {}, epsilon};
    out.values = parallel_map(out.omega.size(), [&](std::size_t i) { return chi_freq(model, out.omega[i], epsilon, quad); });
    return out;
}

double im_chi_limit(const SpectralModel& model, double omega, std::span<const double> epsilons,
                    const QuadratureSpec& quad) {
    std::vector<double> values;
    values.reserve(epsilons.size());
    for (double e : epsilons) values.push_back(chi_freq(model, omega, e, quad).imag());
    return extrapolate_to_zero(epsilons, values);
}

KKReport kk_check(const SpectralModel& model, const GridSpec& grid, double epsilon, const QuadratureSpec& quad,
                  KKDirection direction, double floor) {
    require(epsilon > 0.0, ErrorKind::InvalidArgument, "kk_check: epsilon must be > 0");
    require(floor > 0.0, ErrorKind::InvalidArgument, "kk_check: floor must be > 0");
    grid.validate();
    const double cutoff = effective_cutoff(model, quad);
    KKReport report{{}, 0.0};
    if (cutoff == 0.0) {
        for (double w : grid.points()) report.points.push_back({w, 0.0, 0.0, 0.0});
        return report;
    }
    require(grid.start > 0.0 && grid.stop < cutoff, ErrorKind::InvalidArgument,
            fmt::format("kk_check: grid must lie inside (0, {})", cutoff));

    // χ̃_ε keeps ε-wide tails beyond the support of J; integrate well past it.
    const double outer = 10.0 * cutoff;
    std::vector<double> outer_pts;
    for (double b : model.breakpoints()) add_pole_points(outer_pts, b, epsilon);
    outer_pts.push_back(cutoff);

    const auto omegas = grid.points();
    report.points = parallel_map(omegas.size(), [&](std::size_t i) {
        const double w = omegas[i];
        KKPoint p{w, 0.0, 0.0, 0.0};
        const cplx direct = chi_freq(model, w, epsilon, quad);
        if (direction == KKDirection::RealFromImag) {
            p.direct = direct.real();
            auto g = [&](double x) { return x * chi_freq(model, x, epsilon, quad).imag() / (x + w); };
            // ω'/(ω'² - ω²) = -1/((ω - ω')(ω' + ω))
            p.reconstructed = -(2.0 / std::numbers::pi) * integrate_pv(g, w, 0.0, outer, quad, outer_pts);
        } else {
            p.direct = direct.imag();
            auto g = [&](double x) { return chi_freq(model, x, epsilon, quad).real() / (x + w); };
            p.reconstructed = (2.0 * w / std::numbers::pi) * integrate_pv(g, w, 0.0, outer, quad, outer_pts);
        }
        p.relative_error = std::abs(p.reconstructed - p.direct) / std::max(std::abs(p.direct), floor);
        return p;
    });
    for (const auto& p : report.points) report.residual = std::max(report.residual, p.relative_error);
    return report;
}

double kk_residual(const SpectralModel& model, const GridSpec& grid, double epsilon, const QuadratureSpec& quad,
                   KKDirection direction, double floor) {
    return kk_check(model, grid, epsilon, quad, direction, floor).residual;
}

}  // namespace spinbath
