#pragma once

#include <hmch/errors.hpp>

#include <cmath>
#include <string>

namespace hmch {

/// Coefficients of the flux p(u) = a1 u + a2 u^2 + a3 u^3.
struct ModelParams {
    double a1 = 0.0;
    double a2 = 0.0;
    double a3 = 0.0;

    bool degenerate() const noexcept { return a1 == 0.0 && a2 == 0.0 && a3 == 0.0; }
};

/// Weight of the mean-squared correction q(u) = a2 u^2 + a3 u^3 in the equation.
struct StandardForm {
    static constexpr double mean_weight = 23.0 / 24.0;
};

/**
 * Every pointwise polynomial the equation and its Hamiltonian are built from,
 * evaluated at one value u. Both h2 and the evolution law read these, so an
 * error here shows up in the conservation oracle and in the dynamics together.
 */
struct PointwiseTerms {
    double p;       // a1 u + a2 u^2 + a3 u^3
    double dp;      // p'(u)
    double dup;     // (u p)'(u)
    double q;       // a2 u^2 + a3 u^3
    double dq;      // q'(u)
};

inline PointwiseTerms pointwise_terms(const ModelParams& m, double u) noexcept {
    const double u2 = u * u;
    return {
        m.a1 * u + m.a2 * u2 + m.a3 * u2 * u,
        m.a1 + 2.0 * m.a2 * u + 3.0 * m.a3 * u2,
        2.0 * m.a1 * u + 3.0 * m.a2 * u2 + 4.0 * m.a3 * u2 * u,
        m.a2 * u2 + m.a3 * u2 * u,
        2.0 * m.a2 * u + 3.0 * m.a3 * u2,
    };
}

/// Integrand of H2 at one point: (1/2)[p(u)(2 mu u + u_x^2) - 2 w mu^2 q(u)].
template <class Form = StandardForm>
double h2_density(const ModelParams& m, double u, double ux, double mu) noexcept {
    const auto t = pointwise_terms(m, u);
    return 0.5 * (t.p * (2.0 * mu * u + ux * ux) - 2.0 * Form::mean_weight * mu * mu * t.q);
}

/// Nonlocal source N(u) = mu (u p)'(u) + (1/2) p'(u) u_x^2 - w mu^2 q'(u).
template <class Form = StandardForm>
double nonlocal_source(const ModelParams& m, double u, double ux, double mu) noexcept {
    const auto t = pointwise_terms(m, u);
    return mu * t.dup + 0.5 * t.dp * ux * ux - Form::mean_weight * mu * mu * t.dq;
}

/// Antiderivative sum_i a_i u^{i+1}/(i+1) of the local flux.
inline double flux_primitive(const ModelParams& m, double u) noexcept {
    const double u2 = u * u;
    return m.a1 * u2 / 2.0 + m.a2 * u2 * u / 3.0 + m.a3 * u2 * u2 / 4.0;
}

} // namespace hmch
