#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "spinbath/spectral.hpp"

using namespace spinbath;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

ErrorKind kind_of(auto&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("no error thrown");
    return ErrorKind::InvalidArgument;
}

std::string message_of(auto&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST_CASE("spectral densities", "[spectral]") {
    const auto ohmic = SpectralModel::ohmic(0.1, 1.0, 10.0);
    // mpmath, 30 digits
    CHECK_THAT(spectral_density(ohmic, 2.0), WithinRel(0.163746150615596380824, 1e-14));
    CHECK(spectral_density(ohmic, 0.0) == 0.0);

    const auto sub = SpectralModel::ohmic(0.2, 0.5, 4.0);
    CHECK_THAT(spectral_density(sub, 1.0), WithinRel(0.2 * 1.0 * std::sqrt(4.0) * std::exp(-0.25), 1e-14));

    const auto lor = SpectralModel::lorentzian(0.05, 1.0, 0.2);
    CHECK_THAT(spectral_density(lor, 1.0), WithinRel(0.05 / 0.2, 1e-14));
    CHECK(spectral_density(lor, 0.9) < spectral_density(lor, 1.0));
    CHECK(spectral_density(lor, 1.1) < spectral_density(lor, 1.0));

    const auto flat = SpectralModel::flat(0.5, 0.5, 1.5);
    CHECK(spectral_density(flat, 0.49) == 0.0);
    CHECK(spectral_density(flat, 1.0) == 0.5);
    CHECK(spectral_density(flat, 1.51) == 0.0);

    const auto null = SpectralModel::null();
    CHECK(null.is_null());
    CHECK(spectral_density(null, 3.0) == 0.0);
    CHECK(tail_cutoff(SpectralModel::ohmic(0.0, 1.0, 10.0), 1e-10) == 0.0);
    CHECK_FALSE(ohmic.is_null());
}

TEST_CASE("coupling magnitude inverts the density", "[spectral]") {
    const auto flat = SpectralModel::flat(0.5, 0.5, 1.5);
    CHECK_THAT(coupling_magnitude(flat, 1.0), WithinRel(0.28209479177387814347, 1e-14));

    auto model = SpectralModel::ohmic(0.1, 1.0, 10.0);
    model.constants.c = 2.0;
    for (double w : {0.3, 1.0, 7.0}) {
        const double f = coupling_magnitude(model, w);
        CHECK_THAT(2.0 * std::numbers::pi / 8.0 * w * w * f * f, WithinRel(spectral_density(model, w), 1e-13));
    }
    CHECK(kind_of([&] { (void)coupling_magnitude(model, 0.0); }) == ErrorKind::ZeroFrequency);
    CHECK(kind_of([&] { (void)coupling_magnitude(model, -1.0); }) == ErrorKind::NegativeFrequency);
    CHECK(kind_of([&] { (void)spectral_density(model, -1e-12); }) == ErrorKind::NegativeFrequency);
}

TEST_CASE("model validation", "[spectral]") {
    CHECK_THAT(message_of([] { SpectralModel::ohmic(0.1, 1.0, -3.0).validate(); }), ContainsSubstring("omega_c: must be > 0"));
    CHECK(kind_of([] { SpectralModel::ohmic(-0.1, 1.0, 1.0).validate(); }) == ErrorKind::InvalidArgument);
    CHECK(kind_of([] { SpectralModel::ohmic(0.1, 0.0, 1.0).validate(); }) == ErrorKind::InvalidArgument);
    CHECK(kind_of([] { SpectralModel::lorentzian(0.1, 1.0, 0.0).validate(); }) == ErrorKind::InvalidArgument);
    CHECK(kind_of([] { SpectralModel::flat(0.1, 2.0, 1.0).validate(); }) == ErrorKind::InvalidArgument);
    CHECK_NOTHROW(SpectralModel::flat(0.0, 0.0, 1.0).validate());
    CHECK_NOTHROW(SpectralModel::null().validate());
}

TEST_CASE("model grammar", "[spectral][parse]") {
    for (const char* text : {"ohmic alpha=0.1 s=1 omega_c=10", "lorentzian alpha=0.05 omega_r=1 gamma0=0.2",
                             "flat j0=0.5 lo=0.5 hi=1.5", "null"}) {
        const auto m = parse_model(text);
        CHECK(m.describe() == text);
        CHECK(parse_model(m.describe()).describe() == m.describe());
    }
    CHECK(parse_model("  ohmic  omega_c=10 s=1 alpha=0.1 ").describe() == "ohmic alpha=0.1 s=1 omega_c=10");

    CHECK_THAT(message_of([] { (void)parse_model(""); }), ContainsSubstring("model: missing"));
    CHECK_THAT(message_of([] { (void)parse_model("ohmic alpha=x s=1 omega_c=1"); }), ContainsSubstring("alpha: not a number"));
    CHECK_THAT(message_of([] { (void)parse_model("ohmic alpha=0.1 s=1"); }), ContainsSubstring("omega_c: missing"));
    CHECK_THAT(message_of([] { (void)parse_model("ohmic alpha=0.1 s=1 omega_c=1 hi=2"); }),
               ContainsSubstring("hi: not a parameter"));
    CHECK_THAT(message_of([] { (void)parse_model("ohmic alpha=0.1 s=1 omega_c=-3"); }),
               ContainsSubstring("omega_c: must be > 0"));
    CHECK_THAT(message_of([] { (void)parse_model("gaussian a=1"); }), ContainsSubstring("unknown kind"));
    CHECK(kind_of([] { (void)parse_model("ohmic alpha=0.1 alpha=0.2 s=1 omega_c=1"); }) == ErrorKind::Config);
}

TEST_CASE("tail cutoffs bound the neglected weight", "[spectral]") {
    const double tol = 1e-10;
    CHECK(tail_cutoff(SpectralModel::null(), tol) == 0.0);
    CHECK(tail_cutoff(SpectralModel::flat(0.5, 0.5, 1.5), tol) == 1.5);

    for (const auto& m : {SpectralModel::ohmic(0.1, 1.0, 10.0), SpectralModel::ohmic(0.01, 2.5, 3.0)}) {
        const double cut = tail_cutoff(m, tol);
        const auto& o = std::get<Ohmic>(m.kind);
        // ∫_Λ^∞ J(ω) dω by a plain midpoint sum far into the tail
        double tail = 0.0;
        const double h = o.omega_c / 200.0;
        for (double w = cut + h / 2; w < cut + 60.0 * o.omega_c; w += h) tail += spectral_density(m, w) * h;
        CHECK(tail <= tol);
        CHECK(tail >= 0.1 * tol);
    }

    const auto lor = SpectralModel::lorentzian(0.05, 1.0, 0.2);
    const double cut = tail_cutoff(lor, tol);
    double tail = 0.0;
    for (double w = cut, h = 1.0; w < 1e3 * cut; w += h, h *= 1.001) tail += spectral_density(lor, w + h / 2) * h;
    CHECK(tail <= tol);
    CHECK(tail >= 0.1 * tol);

    QuadratureSpec q;
    q.upper_cutoff = 80.0;
    CHECK(effective_cutoff(SpectralModel::ohmic(0.1, 1.0, 10.0), q) == 80.0);
    CHECK(effective_cutoff(SpectralModel::flat(0.5, 0.5, 1.5), q) == 1.5);
}

TEST_CASE("closed-form transform matches direct summation", "[spectral]") {
    const double cutoff = 80.0;
    auto direct = [cutoff](const SpectralModel& m, double tau) {
        // composite Simpson, fine enough for these smooth integrands
        const int n = 200000;
        const double h = cutoff / n;
        cplx sum = 0.0;
        for (int i = 0; i <= n; ++i) {
            const double w = i * h;
            const double weight = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
            sum += weight * spectral_density(m, w) * std::polar(1.0, -w * tau);
        }
        return sum * h / 3.0;
    };
    for (const auto& m : {SpectralModel::ohmic(0.1, 1.0, 10.0), SpectralModel::ohmic(0.05, 3.0, 2.0)}) {
        for (double tau : {0.0, 0.37, 5.0}) {
            const auto cf = closed_form_transform(m, tau, cutoff);
            REQUIRE(cf.has_value());
            const cplx ref = direct(m, tau);
            CHECK(std::abs(*cf - ref) <= 1e-9 * std::max(1.0, std::abs(ref)));
        }
    }
    const auto flat = SpectralModel::flat(0.5, 0.5, 1.5);
    const auto cf = closed_form_transform(flat, 2.0, cutoff);
    REQUIRE(cf.has_value());
    const cplx exact = 0.5 * (std::polar(1.0, -3.0) - std::polar(1.0, -1.0)) / cplx(0.0, -2.0);
    CHECK(std::abs(*cf - exact) < 1e-14);
    CHECK(closed_form_transform(SpectralModel::null(), 1.0, cutoff) == cplx(0.0));
    CHECK_FALSE(closed_form_transform(SpectralModel::ohmic(0.1, 0.5, 10.0), 1.0, cutoff).has_value());
    CHECK_FALSE(closed_form_transform(SpectralModel::lorentzian(0.05, 1.0, 0.2), 1.0, cutoff).has_value());
}

TEST_CASE("densities are nonnegative", "[spectral][property]") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 300; ++i) {
        const SpectralModel m = i % 3 == 0   ? SpectralModel::ohmic(u(rng), 0.2 + 3.0 * u(rng), 0.5 + 20.0 * u(rng))
                                : i % 3 == 1 ? SpectralModel::lorentzian(u(rng), 5.0 * u(rng), 0.01 + u(rng))
                                             : SpectralModel::flat(u(rng), u(rng), 1.0 + u(rng));
        const double w = 50.0 * u(rng);
        CHECK(spectral_density(m, w) >= 0.0);
    }
}
