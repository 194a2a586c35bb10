#pragma once

#include <hmch/grid_field.hpp>
#include <hmch/model.hpp>

#include <cstddef>
#include <cstdio>
#include <ostream>
#include <tuple>
#include <utility>
#include <vector>

namespace hmch {

/// H0, H1, H2 plus the moments int u^2 and int u^3.
struct InvariantTriple {
    double h0 = 0.0;
    double h1 = 0.0;
    double h2 = 0.0;
    double i2 = 0.0;
    double i3 = 0.0;
};

/**
 * spectral: Parseval / dealiased trapezoid on the band-limited interpolant. Exact
 * for smooth fields, first order for derivative terms of Lipschitz samples.
 *
 * cellwise: the samples are read as a continuous piecewise-smooth function with
 * nodes at x_j. Derivative terms use the cell slope at the cell midpoint, all
 * other terms the trapezoid rule. Second order when kinks sit on nodes or
 * inside cells.
 */
enum class Quadrature { spectral, cellwise };

namespace detail {

// Samples of u and u_x on the 2n-point grid carrying the same band-limited function.
struct PaddedPair {
    std::vector<double> u;
    std::vector<double> ux;
};

inline PaddedPair padded_pair(const PeriodicField& u) {
    const std::size_t m = 2 * u.size();
    const auto U = resample(u, m);
    const auto Ux = resample(derivative(u), m);
    return {{U.samples().begin(), U.samples().end()}, {Ux.samples().begin(), Ux.samples().end()}};
}

template <class F>
double grid_mean(std::size_t n, F&& f) {
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) acc += f(j);
    return acc / static_cast<double>(n);
}

} // namespace detail

inline double h0(const PeriodicField& u) { return mean(u); }

inline double h1(const PeriodicField& u, Quadrature quad = Quadrature::spectral) {
    const double mu = mean(u);
    const std::size_t n = u.size();
    if (quad == Quadrature::spectral) {
        const double grad = detail::weighted_parseval(
            u, u, [n](std::size_t j, long k) { return detail::derivative_weight(j, k, n); });
        return 0.5 * (grad + mu * mu);
    }
    const double dn = static_cast<double>(n);
    const double grad = detail::grid_mean(n, [&](std::size_t j) {
        const double d = (u[(j + 1) % n] - u[j]) * dn;
        return d * d;
    });
    return 0.5 * (grad + mu * mu);
}

template <class Form = StandardForm>
double h2(const PeriodicField& u, const ModelParams& params, Quadrature quad = Quadrature::spectral) {
    const double mu = mean(u);
    const std::size_t n = u.size();
    if (quad == Quadrature::spectral) {
        const auto pp = detail::padded_pair(u);
        return detail::grid_mean(pp.u.size(),
                                 [&](std::size_t j) { return h2_density<Form>(params, pp.u[j], pp.ux[j], mu); });
    }
    // the density splits as h2_density(u, 0) + (1/2) p(u) u_x^2
    const double dn = static_cast<double>(n);
    const double local = detail::grid_mean(n, [&](std::size_t j) { return h2_density<Form>(params, u[j], 0.0, mu); });
    const double grad = detail::grid_mean(n, [&](std::size_t j) {
        const double d = (u[(j + 1) % n] - u[j]) * dn;
        const double mid = 0.5 * (u[j] + u[(j + 1) % n]);
        return 0.5 * pointwise_terms(params, mid).p * d * d;
    });
    return local + grad;
}

/// int u^2 and int u^3; the spectral path evaluates the cube on the padded grid.
inline std::pair<double, double> moments(const PeriodicField& u, Quadrature quad = Quadrature::spectral) {
    if (quad == Quadrature::spectral) {
        const auto U = resample(u, 2 * u.size());
        const double i2 = l2_inner(u, u);
        const double i3 = detail::grid_mean(U.size(), [&](std::size_t j) { return U[j] * U[j] * U[j]; });
        return {i2, i3};
    }
    const std::size_t n = u.size();
    return {detail::grid_mean(n, [&](std::size_t j) { return u[j] * u[j]; }),
            detail::grid_mean(n, [&](std::size_t j) { return u[j] * u[j] * u[j]; })};
}

template <class Form = StandardForm>
InvariantTriple invariants(const PeriodicField& u, const ModelParams& params,
                           Quadrature quad = Quadrature::spectral) {
    InvariantTriple t;
    t.h0 = h0(u);
    t.h1 = h1(u, quad);
    t.h2 = h2<Form>(u, params, quad);
    std::tie(t.i2, t.i3) = moments(u, quad);
    return t;
}

/// Header line of the invariant time series.
inline void write_invariant_header(std::ostream& os) { os << "t,h0,h1,h2,i2,i3\n"; }

inline void write_invariant_row(std::ostream& os, double t, const InvariantTriple& v) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", t, v.h0, v.h1, v.h2, v.i2, v.i3);
    os << buf;
}

} // namespace hmch
