#include <hmch/exact_poly.hpp>
#include <hmch/grid_field.hpp>
#include <hmch/peakon.hpp>
#include <hmch/random_fields.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

using namespace hmch;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

PeriodicField sine(std::size_t n) {
    return PeriodicField::from_function(n, [](double x) { return std::sin(kTwoPi * x); });
}

double max_error(const PeriodicField& f, const PeriodicField& g) { return (f - g).max_abs(); }

} // namespace

TEST(PeriodicField, RejectsBadSizes) {
    EXPECT_THROW(PeriodicField::constant(8, 1.0), DimensionError);
    EXPECT_THROW(PeriodicField::constant(48, 1.0), DimensionError);
    EXPECT_NO_THROW(PeriodicField::constant(16, 1.0));
}

TEST(PeriodicField, SamplesAndCoefficientsAgree) {
    Rng rng(3);
    const auto f = random_band_limited(64, {10, 1.0, 0.5}, rng);
    const auto g = PeriodicField::from_coeffs(std::vector<cplx>(f.coeffs().begin(), f.coeffs().end()));
    EXPECT_LT(max_error(f, g), 1e-12 * f.max_abs());
    for (std::size_t j = 1; j < 64; ++j) EXPECT_NEAR(std::abs(f.coeffs()[j] - std::conj(f.coeffs()[64 - j])), 0.0, 1e-15);
}

TEST(PeriodicField, EvaluateInterpolatesOffGrid) {
    const auto f = PeriodicField::from_function(32, [](double x) { return std::cos(kTwoPi * 3 * x) + 0.5; });
    EXPECT_NEAR(f.evaluate(0.123), std::cos(kTwoPi * 3 * 0.123) + 0.5, 1e-13);
}

TEST(Mean, Examples) {
    EXPECT_NEAR(mean(PeriodicField::constant(32, 3.0)), 3.0, 1e-15);
    EXPECT_NEAR(mean(sine(32)), 0.0, 1e-15);
}

TEST(Mean, SampledPeakon) {
    // The trapezoid rule on the kinked profile overshoots by exactly a/(12 n^2).
    for (std::size_t n : {64u, 1024u}) {
        const auto u = PeriodicField::from_function(n, [](double x) { return peakon_value(1.0, x); });
        EXPECT_NEAR(mean(u), 1.0 + 1.0 / (12.0 * n * n), 1e-13);
    }
    const auto fine = PeriodicField::from_function(32768, [](double x) { return peakon_value(1.0, x); });
    EXPECT_NEAR(mean(fine), 1.0, 1e-10);
}

TEST(Derivative, Examples) {
    EXPECT_LT(derivative(PeriodicField::constant(32, 7.0)).max_abs(), 1e-14);
    const auto cosine = PeriodicField::from_function(64, [](double x) { return kTwoPi * std::cos(kTwoPi * x); });
    EXPECT_LT(max_error(derivative(sine(64)), cosine), 1e-10);
}

TEST(Derivative, MollifiedPeakonApproachesExactSlope) {
    const auto slope = poly_derivative(peakon_profile_exact(1));
    double previous = 1e9;
    for (std::size_t K : {16u, 64u, 256u}) {
        const std::size_t n = 2048;
        const auto du = derivative(mollified_peakon(1.0, n, K));
        double worst = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double x = du.node(j);
            const double y = wrap_unit(x + 0.5) - 0.5;
            if (std::abs(y + 0.5) < 0.1 || std::abs(y - 0.5) < 0.1) continue;  // keep clear of the peak
            worst = std::max(worst, std::abs(du[j] - to_double(slope(Rational(y)))));
        }
        EXPECT_LT(worst, previous);
        EXPECT_LT(worst, 2.0 / static_cast<double>(K));
        previous = worst;
    }
}

TEST(Extrema, Examples) {
    const auto peak = PeriodicField::from_function(1024, [](double x) { return peakon_value(1.0, x); });
    const auto e = extrema(peak);
    EXPECT_NEAR(e.max_value, 13.0 / 12.0, 1e-12);
    EXPECT_NEAR(e.argmax, 0.5, 1e-12);
    EXPECT_NEAR(e.min_value, 23.0 / 24.0, 1e-12);
    EXPECT_NEAR(e.argmin, 0.0, 1e-12);

    const auto c = extrema(PeriodicField::constant(16, 5.0));
    EXPECT_EQ(c.max_value, 5.0);
    EXPECT_EQ(c.min_value, 5.0);

    const auto w = extrema(PeriodicField::from_function(64, [](double x) { return 1.0 + 0.1 * std::cos(kTwoPi * x); }));
    EXPECT_NEAR(w.max_value, 1.1, 1e-12);
    EXPECT_NEAR(w.min_value, 0.9, 1e-12);
    EXPECT_NEAR(w.argmax, 0.0, 1e-12);
    EXPECT_NEAR(w.argmin, 0.5, 1e-12);
}

TEST(Extrema, ParabolicRefinementBetweenNodes) {
    const double x0 = 0.3 + 0.25 / 64.0;
    const auto f = PeriodicField::from_function(64, [&](double x) { return std::cos(kTwoPi * (x - x0)); });
    EXPECT_NEAR(extrema(f).argmax, x0, 1e-4);
}

TEST(MuInner, Examples) {
    EXPECT_NEAR(mu_inner(PeriodicField::constant(32, 1.0), PeriodicField::constant(32, 1.0)), 1.0, 1e-15);
    const auto c = PeriodicField::from_function(32, [](double x) { return std::cos(kTwoPi * x); });
    EXPECT_NEAR(mu_inner(sine(32), c), 0.0, 1e-12);
}

TEST(MuInner, PeakonProjectionMatchesTailSumOracle) {
    // Projection onto |k| < n/2 retains a^2 + a^2/(2 pi^2) * sum_{k < n/2} 1/k^2 of 2 H1 = 13/12 a^2.
    for (std::size_t n : {256u, 4096u}) {
        const auto u = peakon_projection(1.0, n);
        double tail = 0.0;
        for (std::size_t k = 1; k < n / 2; ++k) tail += 1.0 / (static_cast<double>(k) * k);
        const double oracle = 1.0 + tail / (2.0 * std::numbers::pi * std::numbers::pi);
        EXPECT_NEAR(mu_inner(u, u), oracle, 1e-12);
        EXPECT_LT(13.0 / 12.0 - mu_inner(u, u), 1.0 / (std::numbers::pi * std::numbers::pi * (n / 2 - 1)));
    }
}

TEST(H1Norm, Examples) {
    EXPECT_NEAR(h1_norm_sq(PeriodicField::constant(32, 2.0)), 4.0, 1e-14);
    const auto c = PeriodicField::from_function(32, [](double x) { return std::cos(kTwoPi * x); });
    EXPECT_NEAR(h1_norm_sq(c), 0.5 + 2.0 * std::numbers::pi * std::numbers::pi, 1e-12);
}

TEST(H1Norm, EquivalentToMuNormOnRandomFields) {
    Rng rng(11);
    for (int i = 0; i < 200; ++i) {
        const auto f = random_band_limited(128, {20, 2.0, 0.0}, rng) + PeriodicField::constant(128, 0.3 * i / 200.0);
        const double mu2 = mu_inner(f, f), h = h1_norm_sq(f);
        EXPECT_LE(mu2, h * (1 + 1e-14));
        EXPECT_LE(h, 3.0 * mu2 * (1 + 1e-14));
    }
}

TEST(Translate, Examples) {
    const auto s = sine(64);
    EXPECT_EQ(max_error(translate(s, 0.0), s), 0.0);
    EXPECT_LT(max_error(translate(s, 1.0), s), 1e-12);
    const auto mc = PeriodicField::from_function(64, [](double x) { return -std::cos(kTwoPi * x); });
    EXPECT_LT(max_error(translate(s, 0.25), mc), 1e-12);
}

TEST(Translate, ComposesAndPreservesNorms) {
    Rng rng(5);
    const auto f = random_band_limited(128, {30, 1.0, 0.0}, rng);
    EXPECT_LT(max_error(translate(translate(f, 0.17), 0.21), translate(f, 0.38)), 1e-12);
    EXPECT_NEAR(h1_norm_sq(translate(f, 0.4)), h1_norm_sq(f), 1e-10 * h1_norm_sq(f));
}

TEST(Resample, PadThenTruncateRoundTrips) {
    Rng rng(8);
    const auto f = random_band_limited(64, {31, 1.0, 0.2}, rng);
    EXPECT_LT(max_error(resample(resample(f, 256), 64), f), 1e-13);
    const auto big = resample(f, 256);
    EXPECT_NEAR(big.evaluate(0.377), f.evaluate(0.377), 1e-12);
}

TEST(FieldCsv, HeaderAndRows) {
    std::ostringstream os;
    write_field_csv(os, PeriodicField::constant(16, 2.5));
    const auto s = os.str();
    EXPECT_EQ(s.substr(0, 8), "x,value\n");
    EXPECT_NE(s.find("0.0625,2.5\n"), std::string::npos);
}
