// numerics.hpp: adaptive quadrature, principal values, Volterra product
// integration and a fixed-step RK4 stepper shared by the physics modules.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <exception>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <type_traits>
#include <vector>

#include <Eigen/Core>

#include "spinbath/error.hpp"

namespace spinbath {

using cplx = std::complex<double>;

struct QuadratureSpec {
    double abs_tol = 1e-10;
    double rel_tol = 1e-8;
    int max_subdivisions = 2000;
    /// Hard ceiling on every upper integration limit. Models supply their own
    /// tail cutoff; the smaller of the two is used.
    double upper_cutoff = std::numeric_limits<double>::infinity();

    void validate() const;
};

/// Uniform grid of n_points samples on [start, stop].
struct GridSpec {
    double start = 0.0;
    double stop = 1.0;
    std::size_t n_points = 2;

    void validate() const;
    [[nodiscard]] double at(std::size_t i) const;
    [[nodiscard]] std::vector<double> points() const;
};

/// Step count and effective step for a fixed-step march over [0, t_max]. The
/// effective step never exceeds dt and lands exactly on t_max.
struct UniformSteps {
    std::size_t count;
    double dt;
};
[[nodiscard]] UniformSteps uniform_steps(double t_max, double dt);

/// Breakpoints for [a, b]: the endpoints, every interior point that falls
/// strictly inside, decade points beyond the last of those, and (when
/// frequency != 0) extra panels no wider than half an oscillation period,
/// capped at max_panels panels.
[[nodiscard]] std::vector<double> make_partition(double a, double b,
                                                 std::span<const double> interior = {},
                                                 double frequency = 0.0,
                                                 std::size_t max_panels = 20000);

namespace detail {

// 15-point Kronrod abscissae/weights with the embedded 7-point Gauss rule.
inline constexpr std::array<double, 8> kronrod_x = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kronrod_w = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> gauss_w = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

inline bool finite_value(double v) { return std::isfinite(v); }
inline bool finite_value(const cplx& v) { return std::isfinite(v.real()) && std::isfinite(v.imag()); }

template <class T>
struct Segment {
    double a;
    double b;
    T value;
    double error;
};

template <class T, class F>
Segment<T> gauss_kronrod15(F& f, double a, double b) {
    constexpr double eps = std::numeric_limits<double>::epsilon();
    constexpr double tiny = std::numeric_limits<double>::min();
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);

    std::array<T, 7> lo{};
    std::array<T, 7> hi{};
    const T fc = f(center);
    if (!finite_value(fc)) fail(ErrorKind::NonFiniteIntegrand, "non-finite integrand at x=" + std::to_string(center));
    T kronrod = fc * kronrod_w[7];
    T gauss = fc * gauss_w[3];
    double abs_sum = std::abs(fc) * kronrod_w[7];
    for (std::size_t j = 0; j < 7; ++j) {
        const double dx = half * kronrod_x[j];
        lo[j] = f(center - dx);
        hi[j] = f(center + dx);
        if (!finite_value(lo[j]) || !finite_value(hi[j])) {
            fail(ErrorKind::NonFiniteIntegrand, "non-finite integrand near x=" + std::to_string(center));
        }
        kronrod += kronrod_w[j] * (lo[j] + hi[j]);
        abs_sum += kronrod_w[j] * (std::abs(lo[j]) + std::abs(hi[j]));
        if (j % 2 == 1) gauss += gauss_w[j / 2] * (lo[j] + hi[j]);
    }
    const T mean = 0.5 * kronrod;
    double asc = kronrod_w[7] * std::abs(fc - mean);
    for (std::size_t j = 0; j < 7; ++j) {
        asc += kronrod_w[j] * (std::abs(lo[j] - mean) + std::abs(hi[j] - mean));
    }
    const double scale = std::abs(half);
    abs_sum *= scale;
    asc *= scale;
    double err = std::abs((kronrod - gauss) * half);
    if (asc != 0.0 && err != 0.0) err = asc * std::min(1.0, std::pow(200.0 * err / asc, 1.5));
    if (abs_sum > tiny / (50.0 * eps)) err = std::max(50.0 * eps * abs_sum, err);
    return {a, b, kronrod * half, err};
}

// Global adaptive bisection over an initial partition; always splits the
// segment with the largest error estimate.
template <class T, class F>
T adaptive_integrate(F& f, std::span<const double> partition, const QuadratureSpec& spec) {
    std::vector<Segment<T>> heap;
    heap.reserve(partition.size() + static_cast<std::size_t>(spec.max_subdivisions) * 2);
    for (std::size_t i = 0; i + 1 < partition.size(); ++i) {
        if (partition[i + 1] > partition[i]) heap.push_back(gauss_kronrod15<T>(f, partition[i], partition[i + 1]));
    }
    if (heap.empty()) return T{};

    auto by_error = [](const Segment<T>& x, const Segment<T>& y) { return x.error < y.error; };
    auto totals = [&heap]() {
        T value{};
        double error = 0.0;
        for (const auto& s : heap) {
            value += s.value;
            error += s.error;
        }
        return std::pair{value, error};
    };
    std::make_heap(heap.begin(), heap.end(), by_error);
    auto [value, error] = totals();

    int splits = 0;
    while (error > std::max(spec.abs_tol, spec.rel_tol * std::abs(value))) {
        if (splits >= spec.max_subdivisions) {
            fail(ErrorKind::NonConvergence, "quadrature: subdivision budget exhausted (error estimate " +
                                                std::to_string(error) + ")");
        }
        std::pop_heap(heap.begin(), heap.end(), by_error);
        const Segment<T> worst = heap.back();
        heap.pop_back();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b)) {
            fail(ErrorKind::NonConvergence, "quadrature: interval collapsed to machine resolution");
        }
        Segment<T> left = gauss_kronrod15<T>(f, worst.a, mid);
        Segment<T> right = gauss_kronrod15<T>(f, mid, worst.b);
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push_back(left);
        std::push_heap(heap.begin(), heap.end(), by_error);
        heap.push_back(right);
        std::push_heap(heap.begin(), heap.end(), by_error);
        if (++splits % 64 == 0) std::tie(value, error) = totals();
    }
    return totals().first;
}

}  // namespace detail

/// Adaptive Gauss-Kronrod quadrature of f over the given partition. Fails
/// with NonConvergence when max_subdivisions bisections do not reach
/// max(abs_tol, rel_tol*|Q|).
template <class F>
double integrate(F&& f, std::span<const double> partition, const QuadratureSpec& spec) {
    spec.validate();
    return detail::adaptive_integrate<double>(f, partition, spec);
}

template <class F>
double integrate(F&& f, double a, double b, const QuadratureSpec& spec) {
    require(a <= b, ErrorKind::InvalidArgument, "integrate: requires a <= b");
    require(std::isfinite(a) && std::isfinite(b), ErrorKind::InvalidArgument, "integrate: limits must be finite");
    const std::array<double, 2> partition{a, b};
    return integrate(f, std::span<const double>(partition), spec);
}

/// Complex-valued variant; real and imaginary parts share one subdivision.
template <class F>
cplx integrate_complex(F&& f, std::span<const double> partition, const QuadratureSpec& spec) {
    spec.validate();
    return detail::adaptive_integrate<cplx>(f, partition, spec);
}

/// Cauchy principal value P∫_a^b g(x)/(pole - x) dx by singularity
/// subtraction. Inside a window of a few ulps around the pole the subtracted
/// quotient is replaced by its limit -g'(pole).
template <class G>
double integrate_pv(G&& g, double pole, double a, double b, const QuadratureSpec& spec,
                    std::span<const double> breakpoints = {}) {
    require(a < pole && pole < b, ErrorKind::PoleOutsideInterval,
            "integrate_pv: pole " + std::to_string(pole) + " outside (" + std::to_string(a) + ", " +
                std::to_string(b) + ")");
    const double g_pole = g(pole);
    const double scale = std::max(1.0, std::abs(pole));
    const double window = std::sqrt(std::numeric_limits<double>::epsilon()) * scale;
    std::optional<double> slope;
    auto subtracted = [&](double x) {
        const double d = pole - x;
        if (std::abs(d) < window) {
            if (!slope) {
                const double h = std::cbrt(std::numeric_limits<double>::epsilon()) * scale;
                slope = (g(pole + h) - g(pole - h)) / (2.0 * h);
            }
            return -*slope;
        }
        return (g(x) - g_pole) / d;
    };
    std::vector<double> interior(breakpoints.begin(), breakpoints.end());
    interior.push_back(pole);
    const auto partition = make_partition(a, b, interior);
    const double regular = integrate(subtracted, std::span<const double>(partition), spec);
    return regular + g_pole * std::log((pole - a) / (b - pole));
}

/// f(0), …, f(n-1) evaluated on up to `threads` threads (0: hardware_concurrency()) and
/// returned in index order. If any call throws, the exception from the lowest
/// failing index is rethrown, so results and errors do not depend on scheduling.
template <class F>
auto parallel_map(std::size_t n, F&& f, unsigned threads = 0)
    -> std::vector<std::invoke_result_t<F&, std::size_t>> {
    using R = std::invoke_result_t<F&, std::size_t>;
    std::vector<std::optional<R>> slots(n);
    std::vector<std::exception_ptr> errors(n);
    const std::size_t workers = std::min<std::size_t>(n, std::max(1u, threads ? threads : std::thread::hardware_concurrency()));
    auto work = [&](std::size_t first) {
        for (std::size_t i = first; i < n; i += workers) {
            try {
                slots[i].emplace(f(i));
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    {
        std::vector<std::jthread> pool;
        for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work, w);
        if (workers > 0) work(0);
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    std::vector<R> out;
    out.reserve(n);
    for (auto& s : slots) out.push_back(std::move(*s));
    return out;
}

/// Polynomial (Neville) extrapolation of samples y(x) to x = 0.
[[nodiscard]] double extrapolate_to_zero(std::span<const double> x, std::span<const double> y);

/// c(t) sampled on a uniform grid. norm_defect (1 - |c|² - Σ|d_k|²) and
/// modes (d_k at the final sample) are filled only by the discrete-mode oracle.
struct AmplitudeTrajectory {
    std::vector<double> t;
    std::vector<cplx> c;
    std::vector<double> norm_defect;
    std::vector<cplx> modes;
};

/// Solves dc/dt = ∫_0^t K(t-s) c(s) ds with c(0) = 1 on the grid t_n = n*dt,
/// using product-trapezoidal memory quadrature and an implicit trapezoidal
/// step (the step is linear in c_{n+1}, so it is solved exactly).
/// kernel[n] must hold K(n*dt) for n = 0..N.
[[nodiscard]] AmplitudeTrajectory solve_volterra(std::span<const cplx> kernel, double dt,
                                                 double growth_tolerance = 1e-3);

template <class Kernel>
AmplitudeTrajectory solve_volterra(Kernel&& kernel, double t_max, double dt, double growth_tolerance = 1e-3) {
    require(dt > 0.0 && t_max >= dt, ErrorKind::InvalidArgument, "solve_volterra: requires dt > 0 and t_max >= dt");
    const auto n = static_cast<std::size_t>(std::ceil(t_max / dt - 1e-9));
    std::vector<cplx> samples(n + 1);
    for (std::size_t i = 0; i <= n; ++i) samples[i] = kernel(static_cast<double>(i) * dt);
    return solve_volterra(std::span<const cplx>(samples), dt, growth_tolerance);
}

namespace detail {
inline bool finite_state(double s) { return std::isfinite(s); }
template <class Derived>
bool finite_state(const Eigen::MatrixBase<Derived>& s) { return s.allFinite(); }
}  // namespace detail

template <class State>
struct OdeTrajectory {
    std::vector<double> t;
    std::vector<State> states;
};

/// Classical fixed-step RK4 on [0, t_max]. observe(step, t, state) is called
/// for the initial state and after every step.
template <class State, class Rhs, class Observer>
void step_ode(Rhs&& rhs, State state, double t_max, double dt, Observer&& observe) {
    require(dt > 0.0, ErrorKind::InvalidArgument, "step_ode: dt must be > 0");
    require(t_max >= 0.0, ErrorKind::InvalidArgument, "step_ode: t_max must be >= 0");
    require(detail::finite_state(state), ErrorKind::NonFiniteState, "step_ode: non-finite initial state");
    observe(std::size_t{0}, 0.0, static_cast<const State&>(state));
    if (t_max == 0.0) return;
    const auto [count, h] = uniform_steps(t_max, dt);
    for (std::size_t n = 0; n < count; ++n) {
        const double t = static_cast<double>(n) * h;
        const State k1 = rhs(t, state);
        const State k2 = rhs(t + 0.5 * h, State(state + (0.5 * h) * k1));
        const State k3 = rhs(t + 0.5 * h, State(state + (0.5 * h) * k2));
        const State k4 = rhs(t + h, State(state + h * k3));
        state = state + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (!detail::finite_state(state)) {
            fail(ErrorKind::NonFiniteState, "step_ode: state became non-finite at t=" + std::to_string(t + h));
        }
        observe(n + 1, static_cast<double>(n + 1) * h, static_cast<const State&>(state));
    }
}

template <class State, class Rhs>
OdeTrajectory<State> step_ode(Rhs&& rhs, State state0, double t_max, double dt) {
    OdeTrajectory<State> out;
    step_ode(rhs, std::move(state0), t_max, dt, [&out](std::size_t, double t, const State& s) {
        out.t.push_back(t);
        out.states.push_back(s);
    });
    return out;
}

}  // namespace spinbath
