#include <hmch/conservation.hpp>
#include <hmch/peakon.hpp>
#include <hmch/random_fields.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

using namespace hmch;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double rel(double v, const Rational& r) { return std::abs(v - to_double(r)) / std::abs(to_double(r)); }

PeriodicField sampled_peakon(double a, std::size_t n) {
    return PeriodicField::from_function(n, [a](double x) { return peakon_value(a, x); });
}

// H2 of u = b + e cos(2 pi x) by a 4096-point trapezoid rule on the analytic integrand.
double h2_smooth_oracle(const ModelParams& p, double b, double e) {
    const int m = 4096;
    double acc = 0.0;
    for (int j = 0; j < m; ++j) {
        const double x = static_cast<double>(j) / m;
        const double u = b + e * std::cos(kTwoPi * x);
        const double ux = -kTwoPi * e * std::sin(kTwoPi * x);
        const double pu = p.a1 * u + p.a2 * u * u + p.a3 * u * u * u;
        const double qu = p.a2 * u * u + p.a3 * u * u * u;
        acc += 0.5 * (pu * (2.0 * b * u + ux * ux) - 2.0 * (23.0 / 24.0) * b * b * qu);
    }
    return acc / m;
}

} // namespace

TEST(H0, Examples) {
    EXPECT_NEAR(h0(PeriodicField::constant(32, 2.75)), 2.75, 1e-15);
    EXPECT_NEAR(h0(sampled_peakon(1.0, 32768)), 1.0, 1e-10);
    Rng rng(1);
    const auto u = random_positive_field(64, {}, 0.1, rng);
    EXPECT_NEAR(h0(3.5 * u), 3.5 * h0(u), 1e-13);
}

TEST(H1, Examples) {
    EXPECT_NEAR(h1(PeriodicField::constant(32, 3.0)), 4.5, 1e-14);
    EXPECT_NEAR(h1(PeriodicField::constant(32, 3.0), Quadrature::cellwise), 4.5, 1e-14);
    const auto c = PeriodicField::from_function(64, [](double x) { return std::cos(kTwoPi * x); });
    EXPECT_NEAR(h1(c), std::numbers::pi * std::numbers::pi, 1e-12);
    EXPECT_NEAR(rel(h1(sampled_peakon(1.0, 4096), Quadrature::cellwise), rat(13, 24)), 0.0, 1e-6);
}

TEST(H2, ConstantFieldReducesToHandFormula) {
    const ModelParams p{1.5, -0.7, 2.0};
    for (double k : {0.5, 1.0, 2.5}) {
        const double expect = p.a1 * k * k * k + p.a2 * std::pow(k, 4) / 24.0 + p.a3 * std::pow(k, 5) / 24.0;
        EXPECT_NEAR(h2(PeriodicField::constant(32, k), p), expect, 1e-12 * std::max(1.0, expect));
        EXPECT_NEAR(h2(PeriodicField::constant(32, k), p, Quadrature::cellwise), expect, 1e-12 * std::max(1.0, expect));
    }
}

TEST(H2, SampledPeakonMatchesExactCoefficients) {
    const auto u = sampled_peakon(1.0, 4096);
    EXPECT_LT(rel(h2(u, {1, 0, 0}, Quadrature::cellwise), rat(47, 45)), 1e-6);
    EXPECT_LT(rel(h2(u, {0, 1, 0}, Quadrature::cellwise), rat(5387, 60480)), 1e-6);
    EXPECT_LT(rel(h2(u, {0, 0, 1}, Quadrature::cellwise), rat(16733, 181440)), 1e-6);
}

TEST(H2, SmoothFieldMatchesDirectQuadrature) {
    const ModelParams p{1, 1, 1};
    const auto u = PeriodicField::from_function(64, [](double x) { return 1.2 + 0.3 * std::cos(kTwoPi * x); });
    EXPECT_NEAR(h2(u, p), h2_smooth_oracle(p, 1.2, 0.3), 1e-12);
    EXPECT_NEAR(h2(u, p, Quadrature::cellwise), h2_smooth_oracle(p, 1.2, 0.3), 1e-2);
}

TEST(H2, LinearInParameters) {
    Rng rng(3);
    const auto u = random_positive_field(128, {12, 0.4, 0.0}, 0.3, rng);
    const double mix = h2(u, {2, -1, 0.5});
    EXPECT_NEAR(mix, 2 * h2(u, {1, 0, 0}) - h2(u, {0, 1, 0}) + 0.5 * h2(u, {0, 0, 1}), 1e-12 * std::abs(mix));
}

TEST(Invariants, ConstantField) {
    const auto t = invariants(PeriodicField::constant(16, 1.0), {1, 0, 0});
    EXPECT_NEAR(t.h0, 1.0, 1e-15);
    EXPECT_NEAR(t.h1, 0.5, 1e-15);
    EXPECT_NEAR(t.h2, 1.0, 1e-15);
    EXPECT_NEAR(t.i2, 1.0, 1e-15);
    EXPECT_NEAR(t.i3, 1.0, 1e-15);
}

TEST(Invariants, MomentsOfPeakonMatchExactOracle) {
    const auto ex = peakon_invariants_exact(1, {1, 1, 1});
    const auto cell = invariants(sampled_peakon(1.0, 8192), {1, 1, 1}, Quadrature::cellwise);
    EXPECT_NEAR(cell.i2, to_double(ex.i2), 1e-8);
    EXPECT_NEAR(cell.i3, to_double(ex.i3), 1e-8);
    const auto spec = invariants(peakon_projection(1.0, 4096), {1, 1, 1});
    EXPECT_NEAR(spec.i2, to_double(ex.i2), 1e-8);
    EXPECT_NEAR(spec.i3, to_double(ex.i3), 1e-8);
}

TEST(Invariants, CellwiseQuadratureIsSecondOrderOnSampledPeakon) {
    const auto ex = peakon_invariants_exact(1, {1, 1, 1});
    InvariantTriple prev{};
    bool first = true;
    for (std::size_t n : {512u, 1024u, 2048u, 4096u}) {
        const auto t = invariants(sampled_peakon(1.0, n), {1, 1, 1}, Quadrature::cellwise);
        const InvariantTriple err{rel(t.h0, ex.h0), rel(t.h1, ex.h1), rel(t.h2, ex.h2), rel(t.i2, ex.i2), rel(t.i3, ex.i3)};
        if (!first) {
            EXPECT_GE(std::log2(prev.h0 / err.h0), 1.9);
            EXPECT_GE(std::log2(prev.h1 / err.h1), 1.9);
            EXPECT_GE(std::log2(prev.h2 / err.h2), 1.9);
            EXPECT_GE(std::log2(prev.i2 / err.i2), 1.9);
            EXPECT_GE(std::log2(prev.i3 / err.i3), 1.9);
        }
        prev = err;
        first = false;
    }
    EXPECT_LT(std::max({prev.h0, prev.h1, prev.h2, prev.i2, prev.i3}), 1e-6);
}

TEST(Invariants, TranslationInvariant) {
    Rng rng(5);
    const auto u = random_positive_field(128, {20, 0.5, 0.0}, 0.2, rng);
    const auto a = invariants(u, {1, 1, 1});
    const auto b = invariants(translate(u, 0.3137), {1, 1, 1});
    EXPECT_NEAR(a.h1, b.h1, 1e-12 * a.h1);
    EXPECT_NEAR(a.h2, b.h2, 1e-12 * std::abs(a.h2));
    EXPECT_NEAR(a.i3, b.i3, 1e-12 * a.i3);
}

TEST(InvariantCsv, FormatsRows) {
    std::ostringstream os;
    write_invariant_header(os);
    write_invariant_row(os, 0.5, {1, 0.5, 0.25, 2, 3});
    EXPECT_EQ(os.str(), "t,h0,h1,h2,i2,i3\n0.5,1,0.5,0.25,2,3\n");
}
