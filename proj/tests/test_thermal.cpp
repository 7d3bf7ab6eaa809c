#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "spinbath/amplitude.hpp"
#include "spinbath/thermal.hpp"

using namespace spinbath;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {
const auto weak = SpectralModel::ohmic(0.001, 1.0, 10.0);
const auto ohmic = SpectralModel::ohmic(0.01, 1.0, 10.0);
}  // namespace

TEST_CASE("Bose occupation", "[thermal]") {
    CHECK(bose_occupation(ThermalState{0.0, {}}, 1.0) == 0.0);
    CHECK_THAT(bose_occupation(ThermalState{1.0, {}}, 1.0), WithinRel(1.0 / (std::numbers::e - 1.0), 1e-15));
    // high temperature: n ≈ KT/ℏω - 1/2
    CHECK_THAT(bose_occupation(ThermalState{1e4, {}}, 1.0), WithinRel(1e4 - 0.5, 1e-8));
    // units enter only through ℏω/KT
    PhysicalConstants k;
    k.hbar = 2.0;
    k.k_boltzmann = 4.0;
    CHECK_THAT(bose_occupation(ThermalState{1.0, k}, 2.0), WithinRel(1.0 / std::expm1(1.0), 1e-15));

    CHECK_THROWS_AS(bose_occupation(ThermalState{1.0, {}}, 0.0), Error);
    CHECK_THROWS_AS(bose_occupation(ThermalState{-1.0, {}}, 1.0), Error);
}

TEST_CASE("golden-rule rates obey detailed balance", "[thermal][property]") {
    for (const auto& m : {ohmic, SpectralModel::lorentzian(0.05, 1.0, 0.2), SpectralModel::flat(0.5, 0.5, 1.5)}) {
        for (double x : {0.01, 0.1, 1.0, 10.0, 30.0}) {
            const ThermalState th{1.0 / x, {}};
            const double down = golden_rule_rate(m, 1.0, th, Direction::Down);
            const double up = golden_rule_rate(m, 1.0, th, Direction::Up);
            CHECK_THAT(down / up, WithinRel(std::exp(x), 1e-12));
            CHECK_THAT(down - up, WithinRel(2.0 * std::numbers::pi * spectral_density(m, 1.0), 1e-12));
        }
    }
}

TEST_CASE("zero temperature rates", "[thermal]") {
    const ThermalState cold{0.0, {}};
    CHECK(golden_rule_rate(ohmic, 1.0, cold, Direction::Up) == 0.0);
    CHECK_THAT(golden_rule_rate(ohmic, 1.0, cold, Direction::Down), WithinRel(2.0 * 0.0284263058519492728, 1e-14));
    CHECK(finite_time_probability(ohmic, 1.0, cold, Direction::Up, 10.0).probability == 0.0);
    CHECK(golden_rule_rate(SpectralModel::null(), 1.0, ThermalState{3.0, {}}, Direction::Down) == 0.0);
}

TEST_CASE("absorption rate grows with temperature", "[thermal][property]") {
    double previous = 0.0;
    for (double T : GridSpec{0.05, 20.0, 40}.points()) {
        const double up = golden_rule_rate(ohmic, 1.0, ThermalState{T, {}}, Direction::Up);
        CHECK(up >= previous);
        previous = up;
    }
}

TEST_CASE("golden-rule probability", "[thermal]") {
    const ThermalState th{0.5, {}};
    const auto p = golden_rule_probability(ohmic, 1.0, th, Direction::Down, 0.5);
    CHECK(p.regime == Regime::GoldenRule);
    CHECK(p.direction == Direction::Down);
    CHECK_THAT(p.probability, WithinRel(0.5 * golden_rule_rate(ohmic, 1.0, th, Direction::Down), 1e-15));
    CHECK_FALSE(p.perturbation_breakdown);
    CHECK(golden_rule_probability(ohmic, 1.0, th, Direction::Down, 100.0).perturbation_breakdown);
}

TEST_CASE("finite-time probability on a flat band", "[thermal]") {
    // P(t) = J₀ ∫ t² sinc²((ω-ω₀)t/2) dω over the band; compare with a fine Simpson sum
    const auto flat = SpectralModel::flat(0.02, 0.2, 1.5);
    const ThermalState cold{0.0, {}};
    for (double t : {0.5, 5.0, 40.0}) {
        const int n = 400000;
        const double h = 1.3 / n;
        double sum = 0.0;
        for (int i = 0; i <= n; ++i) {
            const double x = 0.2 + i * h - 1.0;
            const double u = 0.5 * x * t;
            const double s = u == 0.0 ? 1.0 : std::sin(u) / u;
            sum += ((i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0)) * t * t * s * s;
        }
        const double ref = 0.02 * sum * h / 3.0;
        const auto p = finite_time_probability(flat, 1.0, cold, Direction::Down, t);
        CHECK(p.regime == Regime::FiniteTime);
        CHECK_THAT(p.probability, WithinRel(ref, 1e-8));
    }
}

TEST_CASE("finite-time probability approaches the golden rule", "[thermal]") {
    const ThermalState cold{0.0, {}};
    const double beta = markov_rates(weak, 1.0).beta;
    CHECK(finite_time_probability(weak, 1.0, cold, Direction::Down, 0.0).probability == 0.0);
    const double r = finite_time_probability(weak, 1.0, cold, Direction::Down, 200.0).probability / 200.0 / (2.0 * beta);
    CHECK_THAT(r, WithinAbs(1.0, 0.02));

    const ThermalState warm{2.0, {}};
    const double up = finite_time_probability(weak, 1.0, warm, Direction::Up, 400.0).probability / 400.0;
    CHECK_THAT(up, WithinRel(golden_rule_rate(weak, 1.0, warm, Direction::Up), 0.02));
}

TEST_CASE("finite-time probability matches the exact decay at short times", "[thermal]") {
    // P is the second-order term of 1 - |c|²; what is left over is fourth order
    QuadratureSpec q;
    q.upper_cutoff = 80.0;
    const auto tr = solve_amplitude(weak, 1.0, 5.0, 0.005, q);
    const ThermalState cold{0.0, {}};
    for (std::size_t i = 20; i < tr.t.size(); i += 100) {
        const double exact = 1.0 - std::norm(tr.c[i]);
        const double p = finite_time_probability(weak, 1.0, cold, Direction::Down, tr.t[i], q).probability;
        CHECK(std::abs(p - exact) <= 2.0 * p * p);
    }
}

TEST_CASE("perturbation breakdown is flagged, not thrown", "[thermal]") {
    const auto strong = SpectralModel::ohmic(0.1, 1.0, 10.0);
    const auto p = finite_time_probability(strong, 1.0, ThermalState{0.5, {}}, Direction::Down, 20.0);
    CHECK(p.probability > perturbation_limit);
    CHECK(p.perturbation_breakdown);
}
