#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "spinbath/response.hpp"

using namespace spinbath;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {
const auto ohmic = SpectralModel::ohmic(0.1, 1.0, 10.0);
const auto lorentz = SpectralModel::lorentzian(0.05, 1.0, 0.2);
}  // namespace

TEST_CASE("chi(t) reference value", "[response]") {
    // mpmath: 4 ∫ J(ω) sin(ω) dω; the neglected tail is worth at most (4/ℏ)·abs_tol
    const double ref = 0.0784236839525536712;
    const double tail = 4.0 * QuadratureSpec{}.abs_tol;
    CHECK_THAT(chi_time(ohmic, 1.0), WithinAbs(ref, tail));
    CHECK_THAT(chi_time(ohmic, 1.0, {}, Tabulation::Auto), WithinAbs(ref, tail));
    CHECK_THAT(chi_time(ohmic, 1.0, {}, Tabulation::Quadrature), WithinAbs(ref, tail));
    QuadratureSpec far;
    far.abs_tol = 1e-14;
    CHECK_THAT(chi_time(ohmic, 1.0, far, Tabulation::Auto), WithinRel(ref, 1e-12));
}

TEST_CASE("chi(t) is causal", "[response][property]") {
    for (double t : {0.0, -0.0, -1e-300, -1.0, -1e6}) {
        CHECK(chi_time(ohmic, t) == 0.0);
        CHECK(chi_time(lorentz, t) == 0.0);
    }
    CHECK(chi_time(SpectralModel::null(), 3.0) == 0.0);
    const auto table = chi_time_table(ohmic, GridSpec{-1.0, 1.0, 5});
    REQUIRE(table.size() == 5);
    CHECK(table[0].value == 0.0);
    CHECK(table[1].value == 0.0);
    CHECK(table[2].value == 0.0);
    CHECK(table[3].value > 0.0);
}

TEST_CASE("chi scales as 1/hbar", "[response]") {
    auto scaled = ohmic;
    scaled.constants.hbar = 2.0;
    CHECK_THAT(chi_time(scaled, 0.7), WithinRel(0.5 * chi_time(ohmic, 0.7), 1e-12));
    const cplx a = chi_freq(scaled, 1.3, 1e-2);
    const cplx b = chi_freq(ohmic, 1.3, 1e-2);
    CHECK_THAT(a.real(), WithinRel(0.5 * b.real(), 1e-12));
    CHECK_THAT(a.imag(), WithinRel(0.5 * b.imag(), 1e-12));
}

TEST_CASE("Im chi approaches 2 pi J / hbar", "[response]") {
    const std::vector<double> eps{1e-2, 5e-3, 1e-3};
    // 2π J(1) for Ohmic(0.1, 1, 10), mpmath
    CHECK_THAT(im_chi_limit(ohmic, 1.0, eps), WithinRel(0.568526117038985455, 1e-6));
    CHECK_THAT(im_chi_limit(lorentz, 0.8, eps), WithinRel(2.0 * std::numbers::pi * spectral_density(lorentz, 0.8), 1e-4));
}

TEST_CASE("chi(omega) is the damped Fourier transform of chi(t)", "[response]") {
    // χ̃_ε(ω) = ∫_0^∞ χ(t) e^{(iω - ε)t} dt; ε = 0.5 makes the tail negligible past t = 60
    const double eps = 0.5;
    const int n = 60000;
    const double h = 60.0 / n;
    std::vector<double> chi(n + 1);
    for (int i = 0; i <= n; ++i) chi[i] = chi_time(ohmic, i * h, {}, Tabulation::Auto);
    for (double w : {0.3, 1.0, 4.0}) {
        cplx sum = 0.0;
        for (int i = 0; i <= n; ++i) {
            const double weight = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
            sum += weight * chi[i] * std::exp(cplx(-eps * i * h, w * i * h));
        }
        sum *= h / 3.0;
        const cplx direct = chi_freq(ohmic, w, eps);
        CHECK(std::abs(direct - sum) < 1e-7 * std::abs(direct));
    }
}

TEST_CASE("chi(omega) symmetry and static limit", "[response][property]") {
    for (double w : {0.2, 1.0, 2.5}) {
        const cplx plus = chi_freq(lorentz, w, 1e-3);
        const cplx minus = chi_freq(lorentz, -w, 1e-3);
        CHECK_THAT(minus.real(), WithinRel(plus.real(), 1e-9));
        CHECK_THAT(minus.imag(), WithinRel(-plus.imag(), 1e-9));
    }
    // Re χ̃(0) → (4/ℏ) ∫ J/ω = 4 α ω_c for the s = 1 Ohmic bath
    CHECK_THAT(chi_freq(ohmic, 0.0, 1e-6).real(), WithinRel(4.0, 1e-4));
    CHECK(chi_freq(SpectralModel::null(), 1.0, 1e-3) == cplx(0.0));
    CHECK_THROWS_AS(chi_freq(ohmic, 1.0, 0.0), Error);
}

TEST_CASE("passivity: omega Im chi >= 0", "[response][property]") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 60; ++i) {
        const SpectralModel m = i % 3 == 0   ? SpectralModel::ohmic(u(rng), 0.3 + 2.0 * u(rng), 1.0 + 10.0 * u(rng))
                                : i % 3 == 1 ? SpectralModel::lorentzian(u(rng), 3.0 * u(rng), 0.05 + u(rng))
                                             : SpectralModel::flat(u(rng), u(rng), 1.0 + u(rng));
        const double w = 6.0 * u(rng) - 3.0;
        CHECK(w * chi_freq(m, w, 1e-3).imag() >= -1e-9);
    }
}

TEST_CASE("Kramers-Kronig reconstruction", "[response][kk]") {
    const GridSpec grid{0.2, 2.5, 6};
    const auto re = kk_check(lorentz, grid, 1e-3);
    REQUIRE(re.points.size() == 6);
    CHECK(re.residual < 1e-8);
    for (const auto& p : re.points) CHECK_THAT(p.reconstructed, WithinRel(p.direct, 1e-8));

    const auto im = kk_check(lorentz, grid, 1e-3, {}, KKDirection::ImagFromReal);
    CHECK(im.residual < 1e-6);

    QuadratureSpec q;
    q.upper_cutoff = 60.0;
    CHECK(kk_residual(ohmic, grid, 1e-2, q) < 1e-6);

    CHECK(kk_residual(ohmic, GridSpec{0.2, 5.0, 12}, 1e-3) <= 5e-3);

    CHECK(kk_residual(SpectralModel::null(), grid, 1e-3) == 0.0);
    CHECK_THROWS_AS(kk_residual(SpectralModel::flat(0.5, 0.5, 1.5), GridSpec{0.1, 3.0, 4}, 1e-3), Error);
}
