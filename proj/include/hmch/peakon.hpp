#pragma once

#include <hmch/conservation.hpp>
#include <hmch/errors.hpp>
#include <hmch/exact_poly.hpp>
#include <hmch/grid_field.hpp>
#include <hmch/model.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>
#include <vector>

namespace hmch {

enum class Regime { i, ii, iii, iv, v, none };

inline std::string to_string(Regime r) {
    switch (r) {
    case Regime::i: return "i";
    case Regime::ii: return "ii";
    case Regime::iii: return "iii";
    case Regime::iv: return "iv";
    case Regime::v: return "v";
    case Regime::none: break;
    }
    return "none";
}

/// First stability regime that holds, with strict inequalities; boundaries give none.
inline Regime classify_regime(const ModelParams& p, double a) {
    if (!(a > 0.0)) throw DomainError("classify_regime: amplitude must be positive");
    if (p.a1 > 0.0 && p.a2 > 0.0 && p.a3 > 0.0) return Regime::i;
    if (p.a2 < 0.0 && p.a2 * p.a2 < 3.0 * p.a1 * p.a3 && p.a3 > 0.0) return Regime::ii;
    if (p.a1 > 0.0 && p.a2 > -6.0 * p.a1 / (13.0 * a) && p.a3 == 0.0) return Regime::iii;
    if (p.a1 == 0.0 && p.a2 > 0.0 && p.a3 == 0.0) return Regime::iv;
    if (p.a1 < 0.0 && p.a2 > -p.a1 / (2.0 * a) && p.a3 == 0.0) return Regime::v;
    return Regime::none;
}

namespace detail {

// Coefficients (ascending) of 12^3 c(a) = sum_i 12^{3-i} 13^i a_i a^i, without the constant term.
inline std::array<double, 4> speed_polynomial(const ModelParams& p) {
    return {0.0, 144.0 * 13.0 * p.a1, 12.0 * 169.0 * p.a2, 2197.0 * p.a3};
}

inline double horner(const std::array<double, 4>& c, double x) {
    return ((c[3] * x + c[2]) * x + c[1]) * x + c[0];
}

inline double horner_derivative(const std::array<double, 4>& c, double x) {
    return (3.0 * c[3] * x + 2.0 * c[2]) * x + c[1];
}

inline double newton_polish(const std::array<double, 4>& c, double x) {
    for (int it = 0; it < 8; ++it) {
        const double d = horner_derivative(c, x);
        if (d == 0.0) break;
        const double step = horner(c, x) / d;
        x -= step;
        if (std::abs(step) <= 1e-16 * std::max(1.0, std::abs(x))) break;
    }
    return x;
}

// Root of a monotone cubic on [lo, hi] with a sign change.
inline double bracketed_root(const std::array<double, 4>& c, double lo, double hi) {
    double flo = horner(c, lo);
    for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(lo)); ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = horner(c, mid);
        if ((fm < 0.0) == (flo < 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return newton_polish(c, 0.5 * (lo + hi));
}

// Real roots of c0 + c1 x + c2 x^2 + c3 x^3, ascending, duplicates merged.
inline std::vector<double> real_roots(const std::array<double, 4>& c) {
    std::vector<double> roots;
    if (c[3] != 0.0) {
        // split at the critical points into monotone pieces
        std::vector<double> cuts;
        const double A = 3.0 * c[3], B = 2.0 * c[2], C = c[1];
        const double disc = B * B - 4.0 * A * C;
        if (disc >= 0.0) {
            const double s = std::sqrt(disc);
            const double q = -0.5 * (B + std::copysign(s, B));
            double r1 = q / A, r2 = q != 0.0 ? C / q : r1;
            if (r1 > r2) std::swap(r1, r2);
            cuts = {r1, r2};
        }
        double bound = 1.0;
        for (int i = 0; i < 3; ++i) bound = std::max(bound, 1.0 + std::abs(c[i] / c[3]));
        std::vector<double> knots{-bound};
        for (double k : cuts) knots.push_back(k);
        knots.push_back(bound);
        for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
            const double lo = knots[i], hi = knots[i + 1];
            const double flo = horner(c, lo), fhi = horner(c, hi);
            if (flo == 0.0) roots.push_back(lo);
            else if ((flo < 0.0) != (fhi < 0.0) && fhi != 0.0) roots.push_back(bracketed_root(c, lo, hi));
        }
        if (horner(c, knots.back()) == 0.0) roots.push_back(knots.back());
        // a double root touching zero at a critical point has no sign change
        for (double k : cuts) {
            const double scale = std::abs(c[0]) + std::abs(c[1] * k) + std::abs(c[2] * k * k) + std::abs(c[3] * k * k * k);
            if (std::abs(horner(c, k)) <= 1e-13 * std::max(scale, 1e-300)) roots.push_back(k);
        }
    } else if (c[2] != 0.0) {
        const double disc = c[1] * c[1] - 4.0 * c[2] * c[0];
        if (disc >= 0.0) {
            const double q = -0.5 * (c[1] + std::copysign(std::sqrt(disc), c[1]));
            roots.push_back(q / c[2]);
            if (q != 0.0) roots.push_back(c[0] / q);
            for (auto& r : roots) r = newton_polish(c, r);
        }
    } else if (c[1] != 0.0) {
        roots.push_back(-c[0] / c[1]);
    }
    std::sort(roots.begin(), roots.end());
    std::vector<double> out;
    for (double r : roots)
        if (out.empty() || std::abs(r - out.back()) > 1e-12 * std::max(1.0, std::abs(r))) out.push_back(r);
    return out;
}

} // namespace detail

/// c = sum_i 12^{3-i} 13^i a^i a_i / 12^3.
inline double speed_from_amplitude(const ModelParams& p, double a) {
    if (!(a > 0.0)) throw DomainError("speed_from_amplitude: amplitude must be positive");
    return detail::horner(detail::speed_polynomial(p), a) / 1728.0;
}

/// Every real amplitude with the given speed, ascending.
inline std::vector<double> amplitude_from_speed(const ModelParams& p, double c) {
    auto poly = detail::speed_polynomial(p);
    poly[0] = -1728.0 * c;
    return detail::real_roots(poly);
}

/// Smallest positive amplitude, or a domain error if none exists.
inline double smallest_positive_amplitude(const ModelParams& p, double c) {
    for (double a : amplitude_from_speed(p, c))
        if (a > 0.0) return a;
    throw DomainError("no positive amplitude for speed " + std::to_string(c));
}

/// M = 13a/12 at x = 1/2; m = 23a/24 at x = 0.
inline double peakon_max(double a) { return 13.0 * a / 12.0; }
inline double peakon_min(double a) { return 23.0 * a / 24.0; }

/// Pointwise periodic profile a (y^2/2 + 23/24), y the representative of x in [-1/2, 1/2).
inline double peakon_value(double a, double x) {
    double y = wrap_unit(x + 0.5) - 0.5;
    return a * (0.5 * y * y + 23.0 / 24.0);
}

/// Exact coefficients of the band-limited projection: a at k = 0, (-1)^k a/(4 pi^2 k^2).
inline cplx peakon_fourier_coefficient(double a, long k) {
    if (k == 0) return a;
    const double w = 2.0 * std::numbers::pi * static_cast<double>(k);
    return (k % 2 == 0 ? 1.0 : -1.0) * a / (w * w);
}

/**
 * One peakon on an n-point grid.
 *
 * samples: point values at the nodes (Lipschitz data, for quadrature studies).
 * spectral: the L2 projection onto |k| < n/2; the field every spectral identity
 * is evaluated against.
 */
struct PeakonProfile {
    double amplitude;
    double speed;
    ModelParams params;
    RationalPiecewise exact;
    PeriodicField samples;
    PeriodicField spectral;

    std::size_t size() const noexcept { return samples.size(); }
};

inline PeriodicField peakon_projection(double a, std::size_t n, std::size_t modes = 0) {
    PeriodicField::check_size(n);
    const std::size_t K = modes == 0 ? n / 2 : modes;
    if (K > n / 2) throw DimensionError("mollification modes exceed the grid's band limit");
    std::vector<cplx> c(n);
    for (std::size_t j = 0; j < n; ++j) {
        const long k = fft::wavenumber(j, n);
        const auto ak = static_cast<std::size_t>(std::abs(k));
        if (ak >= K || j == n / 2) continue;
        double sigma = 1.0;
        if (modes != 0 && k != 0) {
            const double z = std::numbers::pi * static_cast<double>(k) / static_cast<double>(K);
            sigma = std::sin(z) / z;
        }
        c[j] = sigma * peakon_fourier_coefficient(a, k);
    }
    return PeriodicField::from_coeffs(std::move(c));
}

/// Fourier truncation to |k| < K with Lanczos sigma factors; the mean is untouched.
inline PeriodicField mollified_peakon(double a, std::size_t n, std::size_t K) {
    if (K == 0) throw DomainError("mollified_peakon: need at least one mode");
    return peakon_projection(a, n, K);
}

inline PeakonProfile build_peakon(const ModelParams& params, double a, std::size_t n) {
    if (!(a > 0.0)) throw DomainError("build_peakon: amplitude must be positive");
    PeriodicField::check_size(n);
    auto samples = PeriodicField::from_function(n, [a](double x) { return peakon_value(a, x); });
    return {a, speed_from_amplitude(params, a), params, peakon_profile_exact(Rational(a)), std::move(samples),
            peakon_projection(a, n)};
}

/// Closed forms for H0, H1, H2; int phi^2 and int phi^3 come from the exact oracle.
inline ExactInvariants closed_form_invariants_exact(const RationalParams& p, const Rational& a) {
    if (!(a > 0)) throw DomainError("closed_form_invariants: amplitude must be positive");
    ExactInvariants out;
    out.h0 = a;
    out.h1 = rat(13, 24) * a * a;
    const Rational a3 = a * a * a;
    out.h2 = rat(47, 45) * a3 * p.a1 + rat(5387, 60480) * a3 * a * p.a2 + rat(16733, 181440) * a3 * a * a * p.a3;
    const auto phi = peakon_profile_exact(a);
    out.i2 = integrate_period(poly_pow(phi, 2));
    out.i3 = integrate_period(poly_pow(phi, 3));
    return out;
}

inline InvariantTriple closed_form_invariants(const ModelParams& p, double a) {
    const auto e = closed_form_invariants_exact({Rational(p.a1), Rational(p.a2), Rational(p.a3)}, Rational(a));
    return {to_double(e.h0), to_double(e.h1), to_double(e.h2), to_double(e.i2), to_double(e.i3)};
}

} // namespace hmch
