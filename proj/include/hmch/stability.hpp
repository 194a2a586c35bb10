#pragma once

#include <hmch/conservation.hpp>
#include <hmch/errors.hpp>
#include <hmch/evolution.hpp>
#include <hmch/grid_field.hpp>
#include <hmch/model.hpp>
#include <hmch/peakon.hpp>
#include <hmch/random_fields.hpp>

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <numbers>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

namespace hmch {

// ---------------------------------------------------------------- E_u(M, m)

/// What E_u needs from u: three conserved quantities and two moments.
struct EFunctionContext {
    double h0, h1, h2, i2, i3;
    ModelParams params;

    static EFunctionContext from(const InvariantTriple& t, const ModelParams& p) {
        if (!(t.h0 > 0.0)) throw DomainError("E_u requires a positive mean");
        return {t.h0, t.h1, t.h2, t.i2, t.i3, p};
    }
};

namespace detail {

struct EPieces {
    double D;  // 2 H0 (M - m), clamped at 0
    double R;  // sqrt(D)
};

inline EPieces e_pieces(const EFunctionContext& c, double M, double m) {
    if (!(c.h0 > 0.0)) throw DomainError("E_u requires a positive mean");
    if (!(m > 0.0)) throw DomainError("E_u requires m > 0");
    if (M < m) throw DomainError("E_u requires M >= m");
    const double D = std::max(0.0, 2.0 * c.h0 * (M - m));
    return {D, std::sqrt(D)};
}

// Coefficient of (2/H0) D^{3/2} in E_u.
inline double e_tail_poly(const ModelParams& p, double M, double m) {
    return 2.0 * p.a1 / 15.0 * m + p.a1 / 5.0 * M + p.a2 / 7.0 * M * M + 4.0 * p.a2 / 35.0 * m * M +
           8.0 * p.a2 / 105.0 * m * m + p.a3 / 9.0 * M * M * M + 2.0 * p.a3 / 21.0 * m * M * M +
           8.0 * p.a3 / 105.0 * m * m * M + 16.0 * p.a3 / 315.0 * m * m * m;
}

// Common bracket of the second derivatives, multiplying 2 H0 D^{-1/2}.
inline double e_q_poly(const ModelParams& p, double M, double m) {
    return 2.0 * p.a1 / 5.0 * m - 2.0 * p.a1 / 5.0 * M - 4.0 * p.a2 / 7.0 * M * M + 12.0 * p.a2 / 35.0 * m * M +
           8.0 * p.a2 / 35.0 * m * m - 2.0 * p.a3 / 3.0 * M * M * M + 2.0 * p.a3 / 7.0 * m * M * M +
           8.0 * p.a3 / 35.0 * m * m * M + 16.0 * p.a3 / 105.0 * m * m * m;
}

} // namespace detail

inline double e_function(const EFunctionContext& c, double M, double m) {
    const auto [D, R] = detail::e_pieces(c, M, m);
    const auto& p = c.params;
    const double H0 = c.h0;
    const double D32 = D * R;
    const double flux = p.a1 * M + p.a2 * M * M + p.a3 * M * M * M;
    const double corr = H0 * m - 23.0 / 24.0 * H0 * H0;
    return flux * (c.h1 + 0.5 * H0 * H0 - m * H0 - 2.0 / (3.0 * H0) * D32) + p.a1 * m * H0 * H0 - c.h2 +
           corr * p.a2 * c.i2 + corr * p.a3 * c.i3 + 2.0 / H0 * detail::e_tail_poly(p, M, m) * D32;
}

struct EGradient {
    double dM, dm;
};

/// Closed-form first partials of E_u; defined for M >= m > 0.
inline EGradient e_gradient(const EFunctionContext& c, double M, double m) {
    const auto [D, R] = detail::e_pieces(c, M, m);
    const auto& p = c.params;
    const double H0 = c.h0;
    const double D32 = D * R;
    const double base = c.h1 + 0.5 * H0 * H0 - H0 * m;
    EGradient g;
    g.dM = (p.a1 + 2.0 * p.a2 * M + 3.0 * p.a3 * M * M) * base +
           (4.0 * p.a1 / 5.0 * m - 4.0 * p.a1 / 5.0 * M - 8.0 * p.a2 / 7.0 * M * M + 24.0 * p.a2 / 35.0 * m * M +
            16.0 * p.a2 / 35.0 * m * m - 4.0 * p.a3 / 3.0 * M * M * M + 4.0 * p.a3 / 7.0 * m * M * M +
            16.0 * p.a3 / 35.0 * m * m * M + 32.0 * p.a3 / 105.0 * m * m * m) *
               R +
           2.0 / H0 *
               (-2.0 * p.a1 / 15.0 - 8.0 * p.a2 / 21.0 * M + 4.0 * p.a2 / 35.0 * m - 2.0 * p.a3 / 3.0 * M * M +
                4.0 * p.a3 / 21.0 * m * M + 8.0 * p.a3 / 105.0 * m * m) *
               D32;
    g.dm = (p.a1 * M + p.a2 * M * M + p.a3 * M * M * M) * (-H0 + 2.0 * R) + p.a1 * H0 * H0 + p.a2 * H0 * c.i2 +
           p.a3 * H0 * c.i3 - 6.0 * detail::e_tail_poly(p, M, m) * R +
           2.0 / H0 *
               (2.0 * p.a1 / 15.0 + 4.0 * p.a2 / 35.0 * M + 16.0 * p.a2 / 105.0 * m + 2.0 * p.a3 / 21.0 * M * M +
                16.0 * p.a3 / 105.0 * m * M + 16.0 * p.a3 / 105.0 * m * m) *
               D32;
    return g;
}

struct EHessian {
    double MM, Mm, mm;
};

/// Closed-form second partials; M = m is a genuine singularity and is refused.
inline EHessian e_hessian(const EFunctionContext& c, double M, double m) {
    const auto [D, R] = detail::e_pieces(c, M, m);
    if (!(D > 0.0)) throw SingularityError("e_hessian: (M - m)^{-1/2} is singular at M = m");
    const auto& p = c.params;
    const double H0 = c.h0;
    const double D32 = D * R;
    const double base = c.h1 + 0.5 * H0 * H0 - H0 * m;
    const double Q = detail::e_q_poly(p, M, m);
    EHessian h;
    h.MM = (2.0 * p.a2 + 6.0 * p.a3 * M) * base + 2.0 * H0 * Q / R +
           4.0 *
               (-2.0 * p.a1 / 5.0 - 8.0 * p.a2 / 7.0 * M + 12.0 * p.a2 / 35.0 * m - 2.0 * p.a3 * M * M +
                4.0 * p.a3 / 7.0 * m * M + 8.0 * p.a3 / 35.0 * m * m) *
               R -
           2.0 / H0 * (8.0 * p.a2 / 21.0 + 4.0 * p.a3 / 3.0 * M - 4.0 * p.a3 / 21.0 * m) * D32;
    h.Mm = -H0 * (p.a1 + 2.0 * p.a2 * M + 3.0 * p.a3 * M * M) - 2.0 * H0 * Q / R +
           2.0 *
               (4.0 * p.a1 / 5.0 + 52.0 * p.a2 / 35.0 * M + 4.0 * p.a2 / 35.0 * m + 16.0 * p.a3 / 7.0 * M * M -
                4.0 * p.a3 / 35.0 * m * M + 8.0 * p.a3 / 35.0 * m * m) *
               R +
           2.0 / H0 * (4.0 * p.a2 / 35.0 + 4.0 * p.a3 / 21.0 * M + 16.0 * p.a3 / 105.0 * m) * D32;
    h.mm = 2.0 * H0 * Q / R -
           12.0 *
               (2.0 * p.a1 / 15.0 + 4.0 * p.a2 / 35.0 * M + 16.0 * p.a2 / 105.0 * m + 2.0 * p.a3 / 21.0 * M * M +
                16.0 * p.a3 / 105.0 * m * M + 16.0 * p.a3 / 105.0 * m * m) *
               R +
           2.0 / H0 * (16.0 * p.a2 / 105.0 + 16.0 * p.a3 / 105.0 * M + 32.0 * p.a3 / 105.0 * m) * D32;
    return h;
}

/// Hessian diagonal at the peakon point predicted in closed form: (d_MM, d_mm).
inline std::pair<double, double> peakon_hessian_diagonal(const ModelParams& p, double a) {
    return {-a * p.a1 - 13.0 / 6.0 * a * a * p.a2 - 169.0 / 48.0 * a * a * a * p.a3,
            -a * p.a1 - 2.0 * a * a * p.a2 - 721.0 / 240.0 * a * a * a * p.a3};
}

/// Context built from the closed-form peakon invariants.
inline EFunctionContext peakon_context(const ModelParams& p, double a) {
    return EFunctionContext::from(closed_form_invariants(p, a), p);
}

// ---------------------------------------------------------------- g(x)

namespace detail {

// Branch of g at x: +1 on [xi, eta], -1 on (eta, xi + 1). The closed end at xi
// matches derivative samples that take the right-hand piece at a corner.
inline double g_branch(double x, double xi, double eta) {
    const double s = wrap_unit(x - xi);
    const double e = wrap_unit(eta - xi);
    return s <= e ? 1.0 : -1.0;
}

} // namespace detail

/// g = u_x +- sqrt(2 mu (u - m)) with the sign switching at xi (max) and eta (min).
/// u_x, m and mu are supplied by the caller (e.g. from the exact oracle).
inline PeriodicField g_function(const PeriodicField& u, const PeriodicField& ux, double xi, double eta, double m,
                                double mu) {
    PeriodicField::require_same_grid(u, ux);
    if (!(mu > 0.0)) throw DomainError("g_function requires a positive mean");
    std::vector<double> g(u.size());
    for (std::size_t j = 0; j < u.size(); ++j) {
        const double root = std::sqrt(std::max(0.0, 2.0 * mu * (u[j] - m)));
        g[j] = ux[j] + detail::g_branch(u.node(j), xi, eta) * root;
    }
    return PeriodicField::from_samples(std::move(g));
}

/// Spectral u_x and the refined minimum.
inline PeriodicField g_function(const PeriodicField& u, double xi, double eta) {
    return g_function(u, derivative(u), xi, eta, extrema(u).min_value, mean(u));
}

/// Right side of the (1/2) int g^2 identity.
inline double half_g_squared_closed_form(double h0, double h1, double M, double m) {
    const double D = std::max(0.0, 2.0 * h0 * (M - m));
    return h1 + 0.5 * h0 * h0 - m * h0 - 2.0 / (3.0 * h0) * D * std::sqrt(D);
}

namespace detail {

// Gauss-Legendre nodes/weights on [-1, 1] by Newton on P_n.
inline std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int order) {
    std::vector<double> x(order), w(order);
    for (int i = 0; i < order; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = z;
            for (int k = 2; k <= order; ++k) {
                const double pk = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = pk;
            }
            dp = order * (z * p1 - p0) / (z * z - 1.0);
            const double step = p1 / dp;
            z -= step;
            if (std::abs(step) < 1e-16) break;
        }
        x[i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
    return {x, w};
}

} // namespace detail

/**
 * (1/2) int g^2 over the two arcs (xi, eta) and (eta, xi + 1), each integrated
 * by composite Gauss-Legendre on the trigonometric interpolant, so the branch
 * switch and the square-root corner at eta sit on panel ends.
 */
inline double half_g_squared_integral(const PeriodicField& u, double xi, double eta, double m,
                                      int panels = 48, int order = 8) {
    const double mu = mean(u);
    if (!(mu > 0.0)) throw DomainError("g requires a positive mean");
    const auto ux = derivative(u);
    const auto [gx, gw] = detail::gauss_legendre(order);
    const double e = wrap_unit(eta - xi);
    auto arc = [&](double lo, double hi, double sign) {
        double acc = 0.0;
        const double h = (hi - lo) / panels;
        for (int p = 0; p < panels; ++p) {
            const double c = lo + (p + 0.5) * h;
            for (int q = 0; q < order; ++q) {
                const double x = c + 0.5 * h * gx[q];
                const double root = std::sqrt(std::max(0.0, 2.0 * mu * (u.evaluate(x) - m)));
                const double g = ux.evaluate(x) + sign * root;
                acc += 0.5 * h * gw[q] * g * g;
            }
        }
        return acc;
    };
    return 0.5 * (arc(xi, xi + e, 1.0) + arc(xi + e, xi + 1.0, -1.0));
}

/// Newton polish of an interior extremum of the trigonometric interpolant.
inline std::pair<double, double> polish_extremum(const PeriodicField& u, double x0) {
    const auto ux = derivative(u);
    const auto uxx = derivative(ux);
    double x = x0;
    for (int it = 0; it < 30; ++it) {
        const double d2 = uxx.evaluate(x);
        if (d2 == 0.0) break;
        const double step = ux.evaluate(x) / d2;
        if (std::abs(step) > u.spacing()) break;
        x -= step;
        if (std::abs(step) < 1e-15) break;
    }
    x = wrap_unit(x);
    return {x, u.evaluate(x)};
}

/// Extrema of the interpolant: grid + parabola, then Newton on u_x.
inline ExtremaRecord spectral_extrema(const PeriodicField& u) {
    ExtremaRecord r = extrema(u);
    std::tie(r.argmax, r.max_value) = polish_extremum(u, r.argmax);
    std::tie(r.argmin, r.min_value) = polish_extremum(u, r.argmin);
    return r;
}

// ---------------------------------------------------------------- energy identity

struct EnergyGap {
    double lhs;
    double rhs;
};

/// u(x0) by spectral interpolation: translate by -x0 and read node 0.
inline double interpolate_at(const PeriodicField& u, double x0) { return translate(u, -x0)[0]; }

/**
 * Both sides of H1[u] - H1[phi] = (1/2)|u - phi(. - xi)|_mu^2 + a (u(xi + 1/2) - M_phi),
 * phi the band-limited peakon of amplitude a on u's grid. M_phi and H1[phi] are
 * read off that same field.
 */
inline EnergyGap energy_gap_identity(const PeriodicField& u, double a, double xi) {
    if (!(a > 0.0)) throw DomainError("energy_gap_identity: amplitude must be positive");
    const auto phi = peakon_projection(a, u.size());
    const double lhs = h1(u) - h1(phi);
    const auto diff = u - translate(phi, xi);
    const double peak = interpolate_at(phi, 0.5);
    const double rhs = 0.5 * mu_inner(diff, diff) + a * (interpolate_at(u, xi + 0.5) - peak);
    return {lhs, rhs};
}

// ---------------------------------------------------------------- orbital distance

struct OrbitalDistance {
    double dist;
    double best_xi;
};

namespace detail {

// |u - translate(p, xi)|_{H1}^2 coefficientwise, mirroring translate() exactly.
inline double shifted_h1_gap_sq(const PeriodicField& u, const PeriodicField& p, double xi) {
    const std::size_t n = u.size();
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const long k = fft::wavenumber(j, n);
        cplx shifted;
        if (j == n / 2) {
            shifted = p.coeffs()[j] * std::cos(std::numbers::pi * static_cast<double>(n) * xi);
        } else {
            const double angle = -2.0 * std::numbers::pi * static_cast<double>(k) * xi;
            shifted = p.coeffs()[j] * cplx(std::cos(angle), std::sin(angle));
        }
        const double w = 1.0 + derivative_weight(j, k, n);
        acc += w * std::norm(u.coeffs()[j] - shifted);
    }
    return acc;
}

template <class F>
double golden_section(F&& f, double lo, double hi, double tol) {
    const double r = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = hi - r * (hi - lo), x2 = lo + r * (hi - lo);
    double f1 = f(x1), f2 = f(x2);
    while (hi - lo > tol) {
        if (f1 < f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - r * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + r * (hi - lo);
            f2 = f(x2);
        }
    }
    return 0.5 * (lo + hi);
}

} // namespace detail

/// Shift that places the peak of p (at x = 1/2) on the smallest argmax of u.
inline double peak_alignment_shift(const PeriodicField& u) { return wrap_unit(extrema(u).argmax - 0.5); }

/// H1 distance with the peak placed at u's argmax.
inline double distance_at_max(const PeriodicField& u, const PeriodicField& profile) {
    PeriodicField::require_same_grid(u, profile);
    return std::sqrt(std::max(0.0, detail::shifted_h1_gap_sq(u, profile, peak_alignment_shift(u))));
}

inline double distance_at_max(const PeriodicField& u, const PeakonProfile& profile) {
    return distance_at_max(u, profile.spectral);
}

/**
 * min over xi of |u - translate(profile, xi)|_{H1}: coarse scan of the n grid
 * shifts by FFT cross-correlation, golden-section refinement to 1e-10 on the
 * cancellation-free direct sum. The argmax placement is kept as a candidate.
 */
inline OrbitalDistance orbital_distance(const PeriodicField& u, const PeriodicField& profile) {
    PeriodicField::require_same_grid(u, profile);
    const std::size_t n = u.size();
    std::vector<cplx> corr(n);
    for (std::size_t j = 0; j < n; ++j) {
        const long k = fft::wavenumber(j, n);
        corr[j] = (1.0 + detail::derivative_weight(j, k, n)) * u.coeffs()[j] * std::conj(profile.coeffs()[j]);
    }
    // sum_k w u_k conj(p_k) e^{+2 pi i k xi} at xi = s/n; largest real part = closest shift
    const auto c = fft::inverse(std::span<const cplx>(corr));
    std::size_t best = 0;
    for (std::size_t s = 1; s < n; ++s)
        if (c[s].real() > c[best].real()) best = s;
    auto f = [&](double xi) { return detail::shifted_h1_gap_sq(u, profile, xi); };
    const double centre = static_cast<double>(best) / static_cast<double>(n);
    double xi = detail::golden_section(f, centre - u.spacing(), centre + u.spacing(), 1e-10);
    double val = f(xi);
    for (double cand : {centre, peak_alignment_shift(u)}) {
        const double v = f(cand);
        if (v < val) {
            val = v;
            xi = cand;
        }
    }
    xi = wrap_unit(xi);
    if (xi > 1.0 - 1e-12) xi = 0.0;
    return {std::sqrt(std::max(0.0, val)), xi};
}

inline OrbitalDistance orbital_distance(const PeriodicField& u, const PeakonProfile& profile) {
    return orbital_distance(u, profile.spectral);
}

// ---------------------------------------------------------------- experiments

enum class PerturbationKind { none, sin, cos, random };

inline std::optional<PerturbationKind> parse_perturbation_kind(const std::string& s) {
    if (s == "none") return PerturbationKind::none;
    if (s == "sin") return PerturbationKind::sin;
    if (s == "cos") return PerturbationKind::cos;
    if (s == "random") return PerturbationKind::random;
    return std::nullopt;
}

inline std::string to_string(PerturbationKind k) {
    switch (k) {
    case PerturbationKind::none: return "none";
    case PerturbationKind::sin: return "sin";
    case PerturbationKind::cos: return "cos";
    case PerturbationKind::random: return "random";
    }
    return "none";
}

/// delta sin(2 pi x), delta cos(2 pi x), or a random band-limited field with max |.| = delta.
struct PerturbationSpec {
    PerturbationKind kind = PerturbationKind::none;
    double size = 0.0;
    std::uint64_t seed = 0;
};

struct StabilityReport {
    std::vector<double> times;
    std::vector<double> dist_min;
    std::vector<double> dist_at_max;
    std::vector<double> M;
    std::vector<double> m;
    std::vector<double> e_value;
    std::vector<double> xi;
    Regime regime = Regime::none;
    double mollification_distance = 0.0;
    double initial_distance = 0.0;
    double sup_distance = 0.0;
    /// sup_t dist_min / dist_min(0).
    double verdict_ratio = 0.0;
    /// max_t max(|M - 13a/12|, |m - 23a/24|).
    double box_deviation = 0.0;
    InvariantTriple drift;
    std::optional<BlowUpRecord> blowup;
    bool wall_clock_exceeded = false;
};

inline void write_stability_csv(std::ostream& os, const StabilityReport& r) {
    os << "t,dist_min,dist_at_max,M,m,E_value,xi\n";
    char buf[256];
    for (std::size_t i = 0; i < r.times.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.times[i], r.dist_min[i],
                      r.dist_at_max[i], r.M[i], r.m[i], r.e_value[i], r.xi[i]);
        os << buf;
    }
}

inline PeriodicField perturbation_field(std::size_t n, const PerturbationSpec& spec) {
    switch (spec.kind) {
    case PerturbationKind::none: return PeriodicField::constant(n, 0.0);
    case PerturbationKind::sin:
        return PeriodicField::from_function(n, [&](double x) { return spec.size * std::sin(2.0 * std::numbers::pi * x); });
    case PerturbationKind::cos:
        return PeriodicField::from_function(n, [&](double x) { return spec.size * std::cos(2.0 * std::numbers::pi * x); });
    case PerturbationKind::random: {
        Rng rng(spec.seed);
        const auto f = random_band_limited(n, RandomFieldSpec{std::min<std::size_t>(16, n / 2 - 1), 1.0, 0.0}, rng);
        const double peak = f.max_abs();
        return peak > 0.0 ? (spec.size / peak) * f : f;
    }
    }
    return PeriodicField::constant(n, 0.0);
}

/**
 * Evolves mollified peakon + perturbation and measures, at every recorded time,
 * the distance to the orbit of the band-limited peakon, the distance with the
 * peak on u's argmax, (M_u, m_u) and E_u(M_u, m_u).
 */
template <class Form = StandardForm>
StabilityReport stability_experiment(const PeakonProfile& profile, std::size_t mollify_modes,
                                     const PerturbationSpec& perturbation, const SimConfig& cfg) {
    if (profile.size() != cfg.n) throw DimensionError("profile grid does not match the configuration");
    StabilityReport rep;
    rep.regime = classify_regime(profile.params, profile.amplitude);
    const auto smooth = mollified_peakon(profile.amplitude, cfg.n, mollify_modes);
    rep.mollification_distance = orbital_distance(smooth, profile).dist;
    const auto u0 = smooth + perturbation_field(cfg.n, perturbation);
    const auto traj = evolve<Form>(u0, cfg);
    rep.blowup = traj.blowup;
    rep.wall_clock_exceeded = traj.wall_clock_exceeded;
    rep.drift = relative_drift(traj);
    const double M0 = peakon_max(profile.amplitude), m0 = peakon_min(profile.amplitude);
    for (std::size_t i = 0; i < traj.states.size(); ++i) {
        const auto& u = traj.states[i];
        const auto od = orbital_distance(u, profile);
        const auto ex = extrema(u);
        rep.times.push_back(traj.times[i]);
        rep.dist_min.push_back(od.dist);
        rep.dist_at_max.push_back(distance_at_max(u, profile));
        rep.M.push_back(ex.max_value);
        rep.m.push_back(ex.min_value);
        rep.xi.push_back(ex.argmax);
        const auto& inv = traj.invariants[i];
        const bool admissible = inv.h0 > 0.0 && ex.min_value > 0.0;
        rep.e_value.push_back(admissible ? e_function(EFunctionContext::from(inv, profile.params), ex.max_value,
                                                      ex.min_value)
                                         : std::nan(""));
        rep.sup_distance = std::max(rep.sup_distance, od.dist);
        rep.box_deviation = std::max({rep.box_deviation, std::abs(ex.max_value - M0), std::abs(ex.min_value - m0)});
    }
    rep.initial_distance = rep.dist_min.front();
    rep.verdict_ratio = rep.initial_distance > 0.0 ? rep.sup_distance / rep.initial_distance : 0.0;
    return rep;
}

} // namespace hmch
