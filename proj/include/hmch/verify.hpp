#pragma once

#include <hmch/conservation.hpp>
#include <hmch/exact_poly.hpp>
#include <hmch/grid_field.hpp>
#include <hmch/peakon.hpp>
#include <hmch/random_fields.hpp>
#include <hmch/stability.hpp>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

namespace hmch {

struct IdentityCheck {
    std::string name;
    std::string expected;
    std::string computed;
    bool passed = false;
    /// Observed error for numeric checks, 0 for exact ones.
    double error = 0.0;
};

namespace detail {

inline std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

inline IdentityCheck exact_check(std::string name, const Rational& expected, const Rational& computed) {
    return {std::move(name), to_string(expected), to_string(computed), expected == computed, 0.0};
}

inline IdentityCheck bound_check(std::string name, double error, double tol, std::string computed = {}) {
    const bool ok = std::isfinite(error) && error <= tol;
    return {std::move(name), "<= " + fmt(tol), computed.empty() ? fmt(error) : computed, ok, error};
}

inline Rational random_rational(Rng& rng) {
    std::uniform_int_distribution<long> num(1, 997), den(1, 101);
    return Rational(num(rng), den(rng));
}

} // namespace detail

/**
 * Identity suite behind `hmch verify`. Form selects the equation whose numeric
 * H2 is checked against the exact oracle, so a corrupted mean weight fails here.
 */
template <class Form = StandardForm>
std::vector<IdentityCheck> run_identity_suite(std::uint64_t seed = 0) {
    using detail::bound_check;
    using detail::exact_check;
    std::vector<IdentityCheck> out;
    Rng rng(seed);

    // exact oracle against the closed forms
    const RationalParams e1{1, 0, 0}, e2{0, 1, 0}, e3{0, 0, 1};
    const auto x1 = peakon_invariants_exact(1, e1);
    out.push_back(exact_check("H0", 1, x1.h0));
    out.push_back(exact_check("H1", rat(13, 24), x1.h1));
    out.push_back(exact_check("H2_coeff_a1", rat(47, 45), x1.h2));
    out.push_back(exact_check("H2_coeff_a2", rat(5387, 60480), peakon_invariants_exact(1, e2).h2));
    out.push_back(exact_check("H2_coeff_a3", rat(16733, 181440), peakon_invariants_exact(1, e3).h2));
    out.push_back(exact_check("int_phi_x_sq", rat(1, 12),
                              integrate_period(poly_pow(poly_derivative(peakon_profile_exact(1)), 2))));
    {
        bool ok = true;
        std::string bad;
        for (int i = 0; i < 20; ++i) {
            const Rational a = detail::random_rational(rng);
            for (const auto& p : {e1, e2, e3}) {
                const auto ex = peakon_invariants_exact(a, p);
                const auto cf = closed_form_invariants_exact(p, a);
                if (ex.h0 != cf.h0 || ex.h1 != cf.h1 || ex.h2 != cf.h2) {
                    ok = false;
                    bad = to_string(a);
                }
            }
        }
        out.push_back({"closed_forms_random_rational_a", "20 exact matches", ok ? "20 exact matches" : "mismatch at a=" + bad,
                       ok, 0.0});
    }

    // numeric quadrature of the sampled peakon against the oracle
    {
        const ModelParams p{1, 1, 1};
        const auto exact = peakon_invariants_exact(1, {1, 1, 1});
        const auto pk = build_peakon(p, 1.0, 4096);
        const auto num = invariants<Form>(pk.samples, p, Quadrature::cellwise);
        auto rel = [](double v, const Rational& r) { return std::abs(v - to_double(r)) / std::abs(to_double(r)); };
        out.push_back(bound_check("numeric_h0_n4096", rel(num.h0, exact.h0), 1e-6));
        out.push_back(bound_check("numeric_h1_n4096", rel(num.h1, exact.h1), 1e-6));
        out.push_back(bound_check("numeric_h2_n4096", rel(num.h2, exact.h2), 1e-6));
        out.push_back(bound_check("numeric_i2_n4096", rel(num.i2, exact.i2), 1e-6));
        out.push_back(bound_check("numeric_i3_n4096", rel(num.i3, exact.i3), 1e-6));

        const auto ctx_num = EFunctionContext::from(num, p);
        out.push_back(bound_check("E_peakon_numeric", std::abs(e_function(ctx_num, peakon_max(1), peakon_min(1))), 1e-6));
    }

    // E_u and its derivatives at the peakon point
    {
        const ModelParams p{1, 1, 1};
        const auto ctx = peakon_context(p, 1.0);
        const double M = peakon_max(1.0), m = peakon_min(1.0);
        out.push_back(bound_check("E_peakon", std::abs(e_function(ctx, M, m)), 1e-10));
        const auto g = e_gradient(ctx, M, m);
        out.push_back(bound_check("grad_E_peakon", std::hypot(g.dM, g.dm), 1e-9));
        const auto h = e_hessian(ctx, M, m);
        const auto [dMM, dmm] = peakon_hessian_diagonal(p, 1.0);
        out.push_back(bound_check("hessian_MM", std::abs(h.MM - dMM), 1e-10, detail::fmt(h.MM)));
        out.push_back(bound_check("hessian_Mm", std::abs(h.Mm), 1e-9, detail::fmt(h.Mm)));
        out.push_back(bound_check("hessian_mm", std::abs(h.mm - dmm), 1e-10, detail::fmt(h.mm)));
        bool neg = true;
        for (Regime r : {Regime::i, Regime::ii, Regime::iii, Regime::iv, Regime::v}) {
            for (int i = 0; i < 10; ++i) {
                std::uniform_real_distribution<double> amp(0.2, 3.0);
                const double a = amp(rng);
                const auto q = sample_params(r, a, rng);
                const auto hh = e_hessian(peakon_context(q, a), peakon_max(a), peakon_min(a));
                neg = neg && hh.MM < 0.0 && hh.mm < 0.0;
            }
        }
        out.push_back({"hessian_negative_all_regimes", "true", neg ? "true" : "false", neg, 0.0});
    }

    // field identities on random band-limited data
    {
        const std::size_t n = 256;
        double gap = 0.0, e_min = 1e300, chain = 0.0, sup = 0.0, g_err = 0.0;
        for (int i = 0; i < 20; ++i) {
            const auto u = random_positive_field(n, {12, 0.5, 0.0}, 0.2, rng);
            std::uniform_real_distribution<double> s(0.0, 1.0), amp(0.3, 2.0);
            const auto eg = energy_gap_identity(u, amp(rng), s(rng));
            gap = std::max(gap, std::abs(eg.lhs - eg.rhs) / std::max(1.0, std::abs(eg.lhs)));

            const auto ex = spectral_extrema(u);
            const auto inv = invariants(u, ModelParams{1, 1, 1});
            e_min = std::min(e_min, e_function(EFunctionContext::from(inv, {1, 1, 1}), ex.max_value, ex.min_value));

            const double mu2 = mu_inner(u, u), h12 = h1_norm_sq(u);
            chain = std::max({chain, mu2 - h12, h12 - 3.0 * mu2});
            sup = std::max(sup, u.max_abs() / (std::sqrt(13.0 / 12.0) * std::sqrt(mu2)));

            const double lhs = half_g_squared_integral(u, ex.argmax, ex.argmin, ex.min_value);
            g_err = std::max(g_err, std::abs(lhs - half_g_squared_closed_form(inv.h0, inv.h1, ex.max_value, ex.min_value)));
        }
        out.push_back(bound_check("energy_gap_identity", gap, 1e-7));
        out.push_back(bound_check("E_nonnegative_random", std::max(0.0, -e_min), 1e-8, detail::fmt(e_min)));
        out.push_back(bound_check("mu_H1_equivalence", std::max(0.0, chain), 1e-10));
        out.push_back({"sup_bound_random", "< 1", detail::fmt(sup), sup < 1.0, sup});
        out.push_back(bound_check("half_g_squared_identity", g_err, 1e-6));
    }

    // sharpness and g at the peakon
    {
        const auto pk = build_peakon({1, 0, 0}, 1.0, 4096);
        const double ratio = pk.samples.max_abs() / (std::sqrt(13.0 / 12.0) * mu_norm(pk.samples));
        out.push_back(bound_check("sup_bound_sharp_at_peakon", std::abs(ratio - 1.0), 2e-3, detail::fmt(ratio)));
        const auto ux = PeriodicField::from_function(4096, [](double x) { return wrap_unit(x + 0.5) - 0.5; });
        const auto g = g_function(pk.samples, ux, 0.5, 0.0, peakon_min(1.0), 1.0);
        out.push_back(bound_check("g_vanishes_at_peakon", g.max_abs(), 1e-12));
    }
    return out;
}

inline bool all_passed(const std::vector<IdentityCheck>& checks) {
    for (const auto& c : checks)
        if (!c.passed) return false;
    return true;
}

} // namespace hmch
