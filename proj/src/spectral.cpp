#include "spinbath/spectral.hpp"

#include <charconv>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

#include <boost/math/special_functions/gamma.hpp>
#include <fmt/format.h>

namespace spinbath {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void check(bool ok, const char* key, const char* constraint) {
    if (!ok) fail(ErrorKind::InvalidArgument, fmt::format("{}: must be {}", key, constraint));
}

// ∫_0^L x^n e^{-a x} dx for integer n >= 0 and Re a > 0.
cplx power_exp_moment(int n, cplx a, double L) {
    double factorial = 1.0;
    for (int k = 2; k <= n; ++k) factorial *= k;
    const cplx lead = factorial / std::pow(a, n + 1);
    if (!std::isfinite(L)) return lead;
    const cplx y = a * L;
    if (std::abs(y) < 2.0) {
        // 1 - e^{-y} Σ_{k<=n} y^k/k! = e^{-y} Σ_{k>n} y^k/k!
        cplx term = 1.0;
        for (int k = 1; k <= n + 1; ++k) term *= y / static_cast<double>(k);
        cplx tail = 0.0;
        for (int k = n + 1; k < n + 60; ++k) {
            tail += term;
            term *= y / static_cast<double>(k + 1);
            if (std::abs(term) < 1e-18 * std::abs(tail)) break;
        }
        return lead * std::exp(-y) * tail;
    }
    cplx partial = 0.0;
    cplx term = 1.0;
    for (int k = 0; k <= n; ++k) {
        partial += term;
        term *= y / static_cast<double>(k + 1);
    }
    return lead * (1.0 - std::exp(-y) * partial);
}

}  // namespace

void PhysicalConstants::validate() const {
    check(hbar > 0.0, "hbar", "> 0");
    check(c > 0.0, "c", "> 0");
    check(k_boltzmann > 0.0, "k_boltzmann", "> 0");
}

SpectralModel SpectralModel::null() { return {}; }

SpectralModel SpectralModel::ohmic(double alpha, double s, double omega_c) {
    SpectralModel m{Ohmic{alpha, s, omega_c}, {}};
    m.validate();
    return m;
}

SpectralModel SpectralModel::lorentzian(double alpha, double omega_r, double gamma0) {
    SpectralModel m{Lorentzian{alpha, omega_r, gamma0}, {}};
    m.validate();
    return m;
}

SpectralModel SpectralModel::flat(double j0, double lo, double hi) {
    SpectralModel m{FlatWindow{j0, lo, hi}, {}};
    m.validate();
    return m;
}

void SpectralModel::validate() const {
    constants.validate();
    std::visit(overloaded{
                   [](const NullCoupling&) {},
                   [](const Ohmic& o) {
                       check(std::isfinite(o.alpha) && o.alpha >= 0.0, "alpha", ">= 0");
                       check(std::isfinite(o.s) && o.s > 0.0, "s", "> 0");
                       check(std::isfinite(o.omega_c) && o.omega_c > 0.0, "omega_c", "> 0");
                   },
                   [](const Lorentzian& l) {
                       check(std::isfinite(l.alpha) && l.alpha >= 0.0, "alpha", ">= 0");
                       check(std::isfinite(l.omega_r) && l.omega_r >= 0.0, "omega_r", ">= 0");
                       check(std::isfinite(l.gamma0) && l.gamma0 > 0.0, "gamma0", "> 0");
                   },
                   [](const FlatWindow& f) {
                       check(std::isfinite(f.j0) && f.j0 >= 0.0, "j0", ">= 0");
                       check(std::isfinite(f.lo) && f.lo >= 0.0, "lo", ">= 0");
                       check(std::isfinite(f.hi) && f.hi > f.lo, "hi", "> lo");
                   },
               },
               kind);
}

bool SpectralModel::is_null() const { return std::holds_alternative<NullCoupling>(kind); }

std::vector<double> SpectralModel::breakpoints() const {
    if (const auto* f = std::get_if<FlatWindow>(&kind)) return {f->lo, f->hi};
    if (const auto* l = std::get_if<Lorentzian>(&kind)) return {l->omega_r};
    if (const auto* o = std::get_if<Ohmic>(&kind)) return {o->s * o->omega_c};
    return {};
}

std::string SpectralModel::describe() const {
    return std::visit(overloaded{
                          [](const NullCoupling&) { return std::string("null"); },
                          [](const Ohmic& o) {
                              return fmt::format("ohmic alpha={} s={} omega_c={}", o.alpha, o.s, o.omega_c);
                          },
                          [](const Lorentzian& l) {
                              return fmt::format("lorentzian alpha={} omega_r={} gamma0={}", l.alpha, l.omega_r,
                                                 l.gamma0);
                          },
                          [](const FlatWindow& f) { return fmt::format("flat j0={} lo={} hi={}", f.j0, f.lo, f.hi); },
                      },
                      kind);
}

SpectralModel parse_model(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string name;
    if (!(in >> name)) fail(ErrorKind::Config, "model: missing");

    std::map<std::string, double> params;
    std::string token;
    while (in >> token) {
        const auto eq = token.find('=');
        if (eq == std::string::npos || eq == 0 || eq + 1 == token.size()) {
            fail(ErrorKind::Config, fmt::format("model: expected key=value, got '{}'", token));
        }
        const std::string key = token.substr(0, eq);
        const std::string raw = token.substr(eq + 1);
        double value = 0.0;
        const auto [ptr, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), value);
        if (ec != std::errc{} || ptr != raw.data() + raw.size()) {
            fail(ErrorKind::Config, fmt::format("{}: not a number: '{}'", key, raw));
        }
        if (!params.emplace(key, value).second) fail(ErrorKind::Config, fmt::format("{}: given twice", key));
    }

    auto take = [&](const char* key) {
        const auto it = params.find(key);
        if (it == params.end()) fail(ErrorKind::Config, fmt::format("{}: missing for {} model", key, name));
        const double v = it->second;
        params.erase(it);
        return v;
    };

    SpectralModel model;
    if (name == "null") {
        model.kind = NullCoupling{};
    } else if (name == "ohmic") {
        const double alpha = take("alpha");
        const double s = take("s");
        model.kind = Ohmic{alpha, s, take("omega_c")};
    } else if (name == "lorentzian") {
        const double alpha = take("alpha");
        const double omega_r = take("omega_r");
        model.kind = Lorentzian{alpha, omega_r, take("gamma0")};
    } else if (name == "flat") {
        const double j0 = take("j0");
        const double lo = take("lo");
        model.kind = FlatWindow{j0, lo, take("hi")};
    } else {
        fail(ErrorKind::Config, fmt::format("model: unknown kind '{}'", name));
    }
    if (!params.empty()) {
        fail(ErrorKind::Config, fmt::format("{}: not a parameter of the {} model", params.begin()->first, name));
    }
    try {
        model.validate();
    } catch (const Error& e) {
        fail(ErrorKind::Config, e.what());
    }
    return model;
}

double spectral_density(const SpectralModel& model, double omega) {
    require(omega >= 0.0, ErrorKind::NegativeFrequency, fmt::format("spectral_density: omega={} < 0", omega));
    return std::visit(overloaded{
                          [](const NullCoupling&) { return 0.0; },
                          [omega](const Ohmic& o) {
                              if (omega == 0.0 || o.alpha == 0.0) return 0.0;
                              return o.alpha * std::pow(omega, o.s) * std::pow(o.omega_c, 1.0 - o.s) *
                                     std::exp(-omega / o.omega_c);
                          },
                          [omega](const Lorentzian& l) {
                              const double d = omega * omega - l.omega_r * l.omega_r;
                              const double g = l.gamma0 * omega;
                              const double denom = d * d + g * g;
                              if (denom == 0.0) return 0.0;
                              return l.alpha * l.gamma0 * omega / denom;
                          },
                          [omega](const FlatWindow& f) { return (omega >= f.lo && omega <= f.hi) ? f.j0 : 0.0; },
                      },
                      model.kind);
}

double coupling_magnitude(const SpectralModel& model, double omega) {
    require(omega >= 0.0, ErrorKind::NegativeFrequency, fmt::format("coupling_magnitude: omega={} < 0", omega));
    require(omega > 0.0, ErrorKind::ZeroFrequency, "coupling_magnitude: undefined at omega=0");
    const double c = model.constants.c;
    return std::sqrt(c * c * c * spectral_density(model, omega) / (2.0 * std::numbers::pi * omega * omega));
}

double tail_cutoff(const SpectralModel& model, double abs_tol) {
    require(abs_tol > 0.0, ErrorKind::InvalidArgument, "tail_cutoff: abs_tol must be > 0");
    return std::visit(
        overloaded{
            [](const NullCoupling&) { return 0.0; },
            [](const FlatWindow& f) { return f.hi; },
            [abs_tol](const Lorentzian& l) {
                // For ω >= 2ω_r: J(ω) <= (16/9) α γ₀ / ω³, so the tail is below (8/9) α γ₀ / Ω².
                if (l.alpha == 0.0) return 0.0;
                return std::max({2.0 * l.omega_r, 1.0, std::sqrt((8.0 / 9.0) * l.alpha * l.gamma0 / abs_tol)});
            },
            [abs_tol](const Ohmic& o) {
                if (o.alpha == 0.0) return 0.0;
                // Exact tail: α ω_c² Γ(s+1, x), x = Ω/ω_c.
                auto tail = [&o](double x) { return o.alpha * o.omega_c * o.omega_c * boost::math::tgamma(o.s + 1.0, x); };
                double hi = 1.0;
                while (tail(hi) >= abs_tol) hi *= 2.0;
                double lo = hi / 2.0;
                if (tail(lo) < abs_tol) lo = 0.0;
                for (int i = 0; i < 60 && hi - lo > 1e-6 * hi; ++i) {
                    const double mid = 0.5 * (lo + hi);
                    (tail(mid) < abs_tol ? hi : lo) = mid;
                }
                return hi * o.omega_c;
            },
        },
        model.kind);
}

double effective_cutoff(const SpectralModel& model, const QuadratureSpec& quad) {
    quad.validate();
    return std::min(tail_cutoff(model, quad.abs_tol), quad.upper_cutoff);
}

std::optional<cplx> closed_form_transform(const SpectralModel& model, double tau, double cutoff) {
    require(cutoff >= 0.0, ErrorKind::InvalidArgument, "closed_form_transform: cutoff must be >= 0");
    return std::visit(
        overloaded{
            [](const NullCoupling&) -> std::optional<cplx> { return cplx{0.0, 0.0}; },
            [](const Lorentzian&) -> std::optional<cplx> { return std::nullopt; },
            [tau, cutoff](const FlatWindow& f) -> std::optional<cplx> {
                const double hi = std::min(f.hi, cutoff);
                if (hi <= f.lo) return cplx{0.0, 0.0};
                const double width = hi - f.lo;
                const double mid = 0.5 * (hi + f.lo);
                const double x = 0.5 * width * tau;
                const double sinc = std::abs(x) < 1e-8 ? 1.0 - x * x / 6.0 : std::sin(x) / x;
                return f.j0 * width * sinc * std::polar(1.0, -mid * tau);
            },
            [tau, cutoff](const Ohmic& o) -> std::optional<cplx> {
                const double n = std::round(o.s);
                if (std::abs(o.s - n) > 0.0 || n > 20.0) return std::nullopt;
                if (o.alpha == 0.0 || cutoff == 0.0) return cplx{0.0, 0.0};
                const cplx a{1.0 / o.omega_c, tau};
                return o.alpha * std::pow(o.omega_c, 1.0 - o.s) * power_exp_moment(static_cast<int>(n), a, cutoff);
            },
        },
        model.kind);
}

}  // namespace spinbath
