#include <hmch/exact_poly.hpp>
#include <hmch/random_fields.hpp>

#include <gtest/gtest.h>

#include <random>

using namespace hmch;

namespace {

// int_{-1/2}^{1/2} x^{2k} dx
Rational even_moment(unsigned k) {
    Rational four_k = 1;
    for (unsigned i = 0; i < k; ++i) four_k *= 4;
    return 1 / (Rational(2 * k + 1) * four_k);
}

Rational binomial(unsigned n, unsigned k) {
    Rational r = 1;
    for (unsigned i = 1; i <= k; ++i) r = r * Rational(n - k + i) / Rational(i);
    return r;
}

// int (a(x^2/2 + 23/24))^p over the period by the binomial theorem, independent of the piecewise machinery.
Rational peakon_power_oracle(const Rational& a, unsigned p) {
    Rational s = 0, half_pow = 1;
    for (unsigned k = 0; k <= p; ++k) {
        Rational c_pow = 1;
        for (unsigned i = 0; i < p - k; ++i) c_pow *= rat(23, 24);
        s += binomial(p, k) * half_pow * c_pow * even_moment(k);
        half_pow /= 2;
    }
    Rational ap = 1;
    for (unsigned i = 0; i < p; ++i) ap *= a;
    return ap * s;
}

RationalPiecewise identity_on_unit() { return RationalPiecewise({rat(-1, 2), rat(1, 2)}, {Polynomial({0, 1})}); }

} // namespace

TEST(Rational, ParsesFractionsAndDecimals) {
    EXPECT_EQ(parse_rational("13/12"), rat(13, 12));
    EXPECT_EQ(parse_rational("-3"), rat(-3));
    EXPECT_EQ(parse_rational("0.125"), rat(1, 8));
    EXPECT_EQ(parse_rational("1e-2"), rat(1, 100));
    EXPECT_EQ(parse_rational("007/010"), rat(7, 10));
    EXPECT_EQ(parse_rational("-0.5"), rat(-1, 2));
    EXPECT_THROW(parse_rational("abc"), std::exception);
    EXPECT_THROW(parse_rational("1/0"), std::exception);
}

TEST(Polynomial, ArithmeticAndCalculus) {
    const Polynomial p({1, 2, 3});  // 1 + 2x + 3x^2
    EXPECT_EQ(p.derivative(), Polynomial({2, 6}));
    EXPECT_EQ(p.antiderivative().derivative(), p);
    EXPECT_EQ(p(rat(1, 2)), rat(11, 4));
    EXPECT_EQ((p * p)(rat(1, 3)), p(rat(1, 3)) * p(rat(1, 3)));
    EXPECT_EQ(p.shifted(rat(1, 5))(rat(7, 10)), p(rat(1, 2)));
    EXPECT_EQ(p - p, Polynomial());
}

TEST(RationalPiecewise, RejectsBadPartitions) {
    EXPECT_THROW(RationalPiecewise({0, rat(1, 2)}, {Polynomial({1})}), DomainError);
    EXPECT_THROW(RationalPiecewise({0, rat(1, 2), rat(1, 2), 1}, {Polynomial(), Polynomial(), Polynomial()}), DomainError);
    EXPECT_THROW(RationalPiecewise({0, 1}, {}), DomainError);
}

TEST(RationalPiecewise, JumpsAreAllowedAndBreakpointsTakeTheRightPiece) {
    const RationalPiecewise step({0, rat(1, 2), 1}, {Polynomial({1}), Polynomial({-1})});
    EXPECT_EQ(step(0), 1);
    EXPECT_EQ(step(rat(1, 2)), -1);
    EXPECT_EQ(step(rat(3, 2)), -1);
    EXPECT_EQ(step(rat(-1, 4)), -1);
}

TEST(IntegratePeriod, Examples) {
    EXPECT_EQ(integrate_period(peakon_profile_exact(1)), 1);
    EXPECT_EQ(integrate_period(RationalPiecewise::constant(0)), 0);
    const auto x = identity_on_unit();
    EXPECT_EQ(integrate_period(poly_mul(x, x)), rat(1, 12));
}

TEST(IntegratePeriod, InvariantUnderRebasingAndShifts) {
    const auto phi = peakon_profile_exact(rat(7, 3));
    const auto phi3 = poly_pow(phi, 3);
    for (const Rational& s : {rat(1, 3), rat(-5, 7), rat(11, 4)}) {
        EXPECT_EQ(integrate_period(phi3.rebased(s)), integrate_period(phi3));
        EXPECT_EQ(integrate_period(phi3.shifted(s)), integrate_period(phi3));
    }
}

TEST(PolyMul, Examples) {
    const auto phi = peakon_profile_exact(rat(3, 2));
    const auto one = RationalPiecewise::constant(1);
    const auto prod = poly_mul(phi, one);
    for (const Rational& x : {rat(-1, 2), rat(-1, 5), rat(0), rat(2, 7)}) EXPECT_EQ(prod(x), phi(x));
    const auto x = identity_on_unit();
    EXPECT_EQ(poly_mul(x, x).pieces().front(), Polynomial({0, 0, 1}));
    EXPECT_EQ(integrate_period(poly_mul(phi, poly_derivative(phi))), 0);
}

TEST(PolyMul, MergesMisalignedPartitions) {
    const RationalPiecewise f({0, rat(1, 3), 1}, {Polynomial({1}), Polynomial({0, 1})});
    const RationalPiecewise g({0, rat(1, 2), 1}, {Polynomial({0, 2}), Polynomial({3})});
    const auto h = poly_mul(f, g);
    for (const Rational& x : {rat(1, 10), rat(2, 5), rat(3, 4), rat(1, 3), rat(1, 2)}) EXPECT_EQ(h(x), f(x) * g(x));
}

TEST(PolyDerivative, Examples) {
    const auto green = green_function_exact();
    const auto dg = poly_derivative(green);
    for (const Rational& x : {rat(1, 10), rat(1, 2), rat(9, 10)}) EXPECT_EQ(dg(x), x - rat(1, 2));
    EXPECT_EQ(poly_derivative(RationalPiecewise::constant(rat(5, 3)))(rat(1, 4)), 0);
    const Rational a = rat(5, 2);
    const auto d = poly_derivative(peakon_profile_exact(a));
    for (const Rational& x : {rat(-2, 5), rat(0), rat(1, 3)}) EXPECT_EQ(d(x), a * x);
}

TEST(PeakonInvariantsExact, HamiltonianCoefficients) {
    EXPECT_EQ(peakon_invariants_exact(1, {1, 0, 0}).h2, rat(47, 45));
    EXPECT_EQ(peakon_invariants_exact(1, {0, 1, 0}).h2, rat(5387, 60480));
    EXPECT_EQ(peakon_invariants_exact(1, {0, 0, 1}).h2, rat(16733, 181440));
}

TEST(PeakonInvariantsExact, MomentsMatchBinomialOracle) {
    Rng rng(42);
    std::uniform_int_distribution<long> num(1, 500), den(1, 60);
    for (int i = 0; i < 20; ++i) {
        const Rational a(num(rng), den(rng));
        const auto ex = peakon_invariants_exact(a, {1, 1, 1});
        EXPECT_EQ(ex.h0, peakon_power_oracle(a, 1));
        EXPECT_EQ(ex.i2, peakon_power_oracle(a, 2));
        EXPECT_EQ(ex.i3, peakon_power_oracle(a, 3));
        EXPECT_EQ(ex.h1, rat(13, 24) * a * a);
    }
}

TEST(PeakonInvariantsExact, ScalesHomogeneouslyAndLinearlyInParams) {
    const Rational a = rat(9, 7);
    const auto e1 = peakon_invariants_exact(a, {1, 0, 0});
    const auto e2 = peakon_invariants_exact(a, {0, 1, 0});
    const auto e3 = peakon_invariants_exact(a, {0, 0, 1});
    const auto mix = peakon_invariants_exact(a, {rat(2), rat(-3, 5), rat(7, 2)});
    EXPECT_EQ(mix.h2, 2 * e1.h2 - rat(3, 5) * e2.h2 + rat(7, 2) * e3.h2);
    EXPECT_EQ(e1.h2, rat(47, 45) * a * a * a);
    EXPECT_EQ(e3.h2, rat(16733, 181440) * a * a * a * a * a);
    EXPECT_THROW(peakon_invariants_exact(0, {1, 0, 0}), DomainError);
}

TEST(Sample, Examples) {
    const auto c = sample(RationalPiecewise::constant(rat(23, 24)), 16);
    for (std::size_t j = 0; j < 16; ++j) EXPECT_EQ(c[j], 23.0 / 24.0);
    const auto phi = peakon_profile_exact(1);
    EXPECT_EQ(phi(0), rat(23, 24));
    EXPECT_EQ(phi(rat(1, 2)), rat(13, 12));
    const auto s = sample(phi, 64);
    EXPECT_DOUBLE_EQ(s[0], 23.0 / 24.0);
    EXPECT_DOUBLE_EQ(s[32], 13.0 / 12.0);
}

TEST(GreenFunction, MatchesShiftedPeakon) {
    const auto green = green_function_exact();
    EXPECT_EQ(green(0), rat(13, 12));
    EXPECT_EQ(green(rat(1, 2)), rat(23, 24));
    EXPECT_EQ(integrate_period(green), 1);
}
