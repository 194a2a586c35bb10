#include <hmch/evolution.hpp>
#include <hmch/peakon.hpp>
#include <hmch/random_fields.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace hmch;

namespace {

constexpr double kPi = std::numbers::pi;

PeriodicField smooth_bump(std::size_t n) {
    return PeriodicField::from_function(n, [](double x) { return 1.0 + 0.2 * std::cos(2 * kPi * x) + 0.05 * std::sin(6 * kPi * x); });
}

double l2(const PeriodicField& f) { return std::sqrt(l2_inner(f, f)); }

// mu-CH right-hand side written out independently of the generalized model code.
PeriodicField mu_ch_rhs(const PeriodicField& u) {
    const std::size_t n = u.size();
    const auto ux = derivative(u);
    const double mu = mean(u);
    std::vector<double> flux(n), source(n);
    for (std::size_t j = 0; j < n; ++j) {
        flux[j] = u[j] * ux[j];
        source[j] = 2.0 * mu * u[j] + 0.5 * ux[j] * ux[j];
    }
    const auto conv = convolve_phi_x(PeriodicField::from_samples(source));
    auto out = (-1.0) * PeriodicField::from_samples(flux) - conv;
    return out - PeriodicField::constant(n, mean(out));
}

SpaceTimeTest smooth_test(double T) {
    auto g = [](double x) { return 1.0 + 0.5 * std::sin(2 * kPi * x) + 0.25 * std::cos(4 * kPi * x + 0.3); };
    auto gx = [](double x) { return kPi * std::cos(2 * kPi * x) - kPi * std::sin(4 * kPi * x + 0.3); };
    auto h = [T](double t) { const double c = std::cos(kPi * t / (2 * T)); return c * c; };
    return {[=](double t, double x) { return h(t) * g(x); }, [=](double t, double x) { return h(t) * gx(x); }};
}

// Sampled peakon moving at speed c (or frozen when c = 0), on n nodes and n + 1 times in [0, T].
Trajectory analytic_peakon(const ModelParams& p, double a, std::size_t n, double T, bool moving) {
    const double c = moving ? speed_from_amplitude(p, a) : 0.0;
    Trajectory traj;
    for (std::size_t i = 0; i <= n; ++i) {
        const double t = T * static_cast<double>(i) / static_cast<double>(n);
        traj.times.push_back(t);
        traj.states.push_back(PeriodicField::from_function(n, [&](double x) { return peakon_value(a, x - c * t); }));
    }
    return traj;
}

} // namespace

TEST(Rhs, ConstantsAreSteady) {
    for (double k : {0.5, 2.0})
        EXPECT_LT(rhs(PeriodicField::constant(32, k), {1, 1, 1}).max_abs(), 1e-13);
}

TEST(Rhs, ReducesToMuCamassaHolm) {
    Rng rng(2);
    for (int i = 0; i < 5; ++i) {
        const auto u = random_positive_field(64, {10, 0.3, 0.0}, 0.5, rng);
        EXPECT_LT((rhs(u, {1, 0, 0}, false) - mu_ch_rhs(u)).max_abs(), 1e-10 * std::max(1.0, mu_ch_rhs(u).max_abs()));
    }
}

TEST(Rhs, DealiasedProductMatchesPaddedOracle) {
    const auto u = smooth_bump(32);
    const ModelParams p{1, 1, 1};
    // a band-limited field with |k| <= 3: the 2n-grid products are exact, so both paths agree
    EXPECT_LT((rhs(u, p, true) - rhs(u, p, false)).max_abs(), 1e-11);
}

TEST(Rhs, MeanModeIsZero) {
    Rng rng(3);
    const auto u = random_positive_field(64, {20, 0.5, 0.0}, 0.3, rng);
    EXPECT_EQ(rhs(u, {1, -0.5, 2}).coeffs()[0], cplx(0.0));
}

TEST(Rhs, MollifiedPeakonTravelsAtItsSpeed) {
    const ModelParams p{1, 1, 1};
    const double c = speed_from_amplitude(p, 1.0);
    double previous = 1e9;
    for (std::size_t K : {16u, 32u, 64u, 128u}) {
        const std::size_t n = 8 * K;
        const auto u = mollified_peakon(1.0, n, K);
        const auto transport = (-c) * derivative(u);
        const double discrepancy = l2(rhs(u, p) - transport) / l2(transport);
        EXPECT_LT(discrepancy, previous) << "K=" << K;
        previous = discrepancy;
    }
    EXPECT_LT(previous, 0.05);
}

TEST(StepRk4, ConstantUnchangedAndMeanPreserved) {
    const auto c = PeriodicField::constant(32, 1.3);
    EXPECT_LT((step_rk4(c, 1e-2, {1, 1, 1}) - c).max_abs(), 1e-14);
    Rng rng(4);
    const auto u = random_positive_field(64, {12, 0.3, 0.0}, 0.5, rng);
    EXPECT_NEAR(mean(step_rk4(u, 1e-3, {1, 1, 1})), mean(u), 1e-15);
    EXPECT_THROW(step_rk4(u, 0.0, {1, 1, 1}), DomainError);
}

TEST(StepRk4, LocalErrorIsFifthOrder) {
    const ModelParams p{1, 1, 1};
    const auto u = smooth_bump(32);
    auto f = [&](const PeriodicField& v) { return rhs(v, p); };
    auto reference = [&](double dt) {
        PeriodicField v = u;
        for (int i = 0; i < 64; ++i) v = rk4_step(v, dt / 64, f);
        return v;
    };
    std::vector<double> errs;
    for (double dt : {4e-3, 2e-3, 1e-3}) errs.push_back(l2(rk4_step(u, dt, f) - reference(dt)));
    for (std::size_t i = 0; i + 1 < errs.size(); ++i) {
        const double ratio = errs[i] / errs[i + 1];
        EXPECT_GT(ratio, 24.0);
        EXPECT_LT(ratio, 40.0);
    }
}

TEST(StepRk4, TimeReversalClosesAtFourthOrder) {
    const ModelParams p{1, 0.5, 0.25};
    const auto u0 = smooth_bump(32);
    auto f = [&](const PeriodicField& v) { return rhs(v, p); };
    auto round_trip = [&](int steps) {
        const double dt = 0.1 / steps;
        PeriodicField u = u0;
        for (int i = 0; i < steps; ++i) u = rk4_step(u, dt, f);
        EXPECT_GT((u - u0).max_abs(), 1e-3);
        for (int i = 0; i < steps; ++i) u = rk4_step(u, -dt, f);
        return (u - u0).max_abs();
    };
    const double coarse = round_trip(25), fine = round_trip(50);
    EXPECT_LT(coarse, 1e-4);
    EXPECT_GT(std::log2(coarse / fine), 3.7);
}

TEST(StepRk4, NonFiniteStateRaisesBlowUp) {
    std::vector<double> s(32, 1.0);
    s[3] = std::nan("");
    try {
        step_rk4(PeriodicField::from_samples(s), 0.1, {1, 0, 0}, true, 0.4);
        FAIL() << "expected BlowUpError";
    } catch (const BlowUpError& e) {
        EXPECT_DOUBLE_EQ(e.time(), 0.5);
    }
}

TEST(Evolve, ConstantStateStaysConstant) {
    SimConfig cfg;
    cfg.n = 32;
    cfg.t_end = 1.0;
    cfg.dt = 0.05;
    cfg.params = {1, 1, 1};
    const auto traj = evolve(PeriodicField::constant(32, 1.0), cfg);
    ASSERT_EQ(traj.states.size(), 21u);
    for (const auto& u : traj.states) EXPECT_LT((u - PeriodicField::constant(32, 1.0)).max_abs(), 1e-13);
    EXPECT_DOUBLE_EQ(traj.times.back(), 1.0);
}

TEST(Evolve, StepIsShrunkToLandOnFinalTime) {
    SimConfig cfg;
    cfg.n = 16;
    cfg.t_end = 1.0;
    cfg.dt = 0.3;
    cfg.record_every = 3;
    const auto traj = evolve(PeriodicField::constant(16, 1.0), cfg);
    EXPECT_EQ(traj.steps, 4u);
    EXPECT_DOUBLE_EQ(traj.dt, 0.25);
    ASSERT_EQ(traj.times.size(), 3u);  // 0, step 3, final step
    EXPECT_DOUBLE_EQ(traj.times[1], 0.75);
}

TEST(Evolve, RejectsInvalidConfigurations) {
    SimConfig cfg;
    cfg.n = 32;
    cfg.params = {1, 0, 0};
    EXPECT_THROW(evolve(PeriodicField::constant(32, 1.0), cfg), DomainError);  // neither dt nor cfl
    cfg.dt = 0.1;
    cfg.cfl = 0.3;
    EXPECT_THROW(evolve(PeriodicField::constant(32, 1.0), cfg), DomainError);
    cfg.cfl.reset();
    EXPECT_THROW(evolve(PeriodicField::constant(64, 1.0), cfg), DimensionError);
}

TEST(Evolve, NonFiniteDataIsReportedNotThrown) {
    std::vector<double> s(32, 1.0);
    s[0] = std::numeric_limits<double>::infinity();
    SimConfig cfg;
    cfg.n = 32;
    cfg.dt = 0.1;
    cfg.params = {1, 0, 0};
    const auto traj = evolve(PeriodicField::from_samples(s), cfg);
    ASSERT_TRUE(traj.blowup.has_value());
    EXPECT_DOUBLE_EQ(traj.blowup->time, 0.1);
    EXPECT_FALSE(traj.complete());
}

TEST(Evolve, MuCamassaHolmPeakonConservesInvariants) {
    SimConfig cfg;
    cfg.n = 512;
    cfg.t_end = 1.0;
    cfg.cfl = 0.3;
    cfg.params = {1, 0, 0};
    cfg.record_every = 50;
    const auto u0 = mollified_peakon(1.0, 512, 64);
    const auto traj = evolve(u0, cfg);
    ASSERT_TRUE(traj.complete());
    const auto d = relative_drift(traj);
    EXPECT_LE(d.h0, 1e-12);
    EXPECT_LE(d.h1, 1e-6);
    EXPECT_LE(d.h2, 1e-6);
    const double mollification = std::abs(extrema(u0).max_value - 13.0 / 12.0);
    for (const auto& u : traj.states) EXPECT_LE(std::abs(extrema(u).max_value - 13.0 / 12.0), mollification + 1e-3);
}

TEST(WeakResidual, ConstantStateIsAWeakSolution) {
    const double T = 0.5;
    Trajectory traj;
    for (int i = 0; i <= 32; ++i) {
        traj.times.push_back(T * i / 32.0);
        traj.states.push_back(PeriodicField::constant(32, 1.7));
    }
    EXPECT_LE(weak_residual(traj, smooth_test(T), {1, 1, 1}), 1e-10);
}

TEST(WeakResidual, TravelingPeakonConvergesAndFrozenControlDoesNot) {
    const ModelParams p{1, 1, 1};
    const double T = 0.5;
    const auto psi = smooth_test(T);
    std::vector<double> moving, frozen;
    for (std::size_t n : {64u, 128u, 256u}) {
        moving.push_back(weak_residual(analytic_peakon(p, 1.0, n, T, true), psi, p));
        frozen.push_back(weak_residual(analytic_peakon(p, 1.0, n, T, false), psi, p));
    }
    for (std::size_t i = 0; i + 1 < moving.size(); ++i) {
        EXPECT_GE(std::log2(moving[i] / moving[i + 1]), 1.0);
        EXPECT_GT(frozen[i + 1], 1e-2);
    }
    EXPECT_LT(moving.back(), 1e-3);
}

TEST(WeakResidual, EmptyTrajectoryIsAnError) {
    EXPECT_THROW(weak_residual(Trajectory{}, smooth_test(1.0), {1, 0, 0}), DomainError);
}
