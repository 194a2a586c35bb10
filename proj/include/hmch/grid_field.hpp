#pragma once

#include <hmch/errors.hpp>
#include <hmch/fft.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <span>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

namespace hmch {

using cplx = std::complex<double>;

inline constexpr std::size_t kMinGridSize = 16;

/**
 * Real function on the unit circle R/Z held on the uniform grid x_j = j/n.
 *
 * Samples and normalized Fourier coefficients are both computed at construction,
 * so a field is an immutable value that can be shared across threads. Slot j of
 * coeffs() carries wavenumber fft::wavenumber(j, n); the Nyquist slot n/2 is the
 * real amplitude of cos(pi n x).
 */
class PeriodicField {
public:
    static PeriodicField from_samples(std::vector<double> samples) {
        check_size(samples.size());
        auto coeffs = fft::forward(std::span<const double>(samples));
        symmetrize(coeffs);
        return PeriodicField(std::move(samples), std::move(coeffs));
    }

    /// Coefficients are projected onto the conjugate-symmetric (real) subspace.
    static PeriodicField from_coeffs(std::vector<cplx> coeffs) {
        check_size(coeffs.size());
        symmetrize(coeffs);
        const auto values = fft::inverse(std::span<const cplx>(coeffs));
        std::vector<double> samples(values.size());
        std::transform(values.begin(), values.end(), samples.begin(), [](cplx v) { return v.real(); });
        return PeriodicField(std::move(samples), std::move(coeffs));
    }

    template <class F>
    static PeriodicField from_function(std::size_t n, F&& f) {
        check_size(n);
        std::vector<double> s(n);
        for (std::size_t j = 0; j < n; ++j) s[j] = f(static_cast<double>(j) / static_cast<double>(n));
        return from_samples(std::move(s));
    }

    static PeriodicField constant(std::size_t n, double value) {
        return from_samples(std::vector<double>(n, value));
    }

    std::size_t size() const noexcept { return samples_.size(); }
    double spacing() const noexcept { return 1.0 / static_cast<double>(size()); }
    double node(std::size_t j) const noexcept { return static_cast<double>(j) * spacing(); }

    std::span<const double> samples() const noexcept { return samples_; }
    std::span<const cplx> coeffs() const noexcept { return coeffs_; }
    double operator[](std::size_t j) const noexcept { return samples_[j]; }

    /// Trigonometric interpolant evaluated at an arbitrary point.
    double evaluate(double x) const {
        const std::size_t n = size();
        double acc = coeffs_[0].real();
        for (std::size_t k = 1; k < n / 2; ++k) {
            const double angle = 2.0 * std::numbers::pi * static_cast<double>(k) * x;
            acc += 2.0 * (coeffs_[k] * cplx(std::cos(angle), std::sin(angle))).real();
        }
        acc += coeffs_[n / 2].real() * std::cos(std::numbers::pi * static_cast<double>(n) * x);
        return acc;
    }

    double max_abs() const {
        double m = 0.0;
        for (double v : samples_) m = std::max(m, std::abs(v));
        return m;
    }

    bool all_finite() const {
        return std::all_of(samples_.begin(), samples_.end(), [](double v) { return std::isfinite(v); });
    }

    friend PeriodicField operator+(const PeriodicField& a, const PeriodicField& b) {
        return combine(a, b, 1.0, 1.0);
    }
    friend PeriodicField operator-(const PeriodicField& a, const PeriodicField& b) {
        return combine(a, b, 1.0, -1.0);
    }
    friend PeriodicField operator*(double s, const PeriodicField& a) {
        std::vector<double> v(a.samples_);
        for (auto& x : v) x *= s;
        std::vector<cplx> c(a.coeffs_);
        for (auto& x : c) x *= s;
        return PeriodicField(std::move(v), std::move(c));
    }

    /// a*f + b*g, computed in both representations without another transform.
    static PeriodicField combine(const PeriodicField& f, const PeriodicField& g, double a, double b) {
        require_same_grid(f, g);
        std::vector<double> v(f.size());
        std::vector<cplx> c(f.size());
        for (std::size_t j = 0; j < f.size(); ++j) {
            v[j] = a * f.samples_[j] + b * g.samples_[j];
            c[j] = a * f.coeffs_[j] + b * g.coeffs_[j];
        }
        return PeriodicField(std::move(v), std::move(c));
    }

    static void require_same_grid(const PeriodicField& f, const PeriodicField& g) {
        if (f.size() != g.size())
            throw DimensionError("grid mismatch: " + std::to_string(f.size()) + " vs " + std::to_string(g.size()));
    }

    static void check_size(std::size_t n) {
        if (n < kMinGridSize || !fft::is_power_of_two(n))
            throw DimensionError("grid size must be a power of two >= 16, got " + std::to_string(n));
    }

private:
    PeriodicField(std::vector<double> s, std::vector<cplx> c) : samples_(std::move(s)), coeffs_(std::move(c)) {}

    static void symmetrize(std::vector<cplx>& c) {
        const std::size_t n = c.size();
        c[0] = c[0].real();
        c[n / 2] = c[n / 2].real();
        for (std::size_t k = 1; k < n / 2; ++k) {
            const cplx avg = 0.5 * (c[k] + std::conj(c[n - k]));
            c[k] = avg;
            c[n - k] = std::conj(avg);
        }
    }

    std::vector<double> samples_;
    std::vector<cplx> coeffs_;
};

/// M_u, m_u and where they are attained.
struct ExtremaRecord {
    double max_value = 0.0;
    double argmax = 0.0;
    double min_value = 0.0;
    double argmin = 0.0;
};

inline double wrap_unit(double x) {
    double r = x - std::floor(x);
    return r >= 1.0 ? 0.0 : r;
}

inline double mean(const PeriodicField& f) { return f.coeffs()[0].real(); }

/// Spectral derivative; the Nyquist mode is dropped.
inline PeriodicField derivative(const PeriodicField& f) {
    const std::size_t n = f.size();
    std::vector<cplx> c(n);
    for (std::size_t j = 0; j < n; ++j) {
        if (j == n / 2) continue;
        const double k = static_cast<double>(fft::wavenumber(j, n));
        c[j] = cplx(0.0, 2.0 * std::numbers::pi * k) * f.coeffs()[j];
    }
    return PeriodicField::from_coeffs(std::move(c));
}

/// Exact spectral shift: returns f(x - xi).
inline PeriodicField translate(const PeriodicField& f, double xi) {
    const std::size_t n = f.size();
    // whole-node shifts are a pure rotation of the samples
    const double nodes = xi * static_cast<double>(n);
    if (nodes == std::floor(nodes) && std::abs(nodes) < 1e15) {
        const auto shift = static_cast<std::size_t>(static_cast<long long>(nodes) % static_cast<long long>(n) +
                                                    static_cast<long long>(n)) % n;
        if (shift == 0) return f;
        std::vector<double> s(n);
        for (std::size_t j = 0; j < n; ++j) s[(j + shift) % n] = f[j];
        return PeriodicField::from_samples(std::move(s));
    }
    std::vector<cplx> c(n);
    for (std::size_t j = 0; j < n; ++j) {
        if (j == n / 2) {
            c[j] = f.coeffs()[j] * std::cos(std::numbers::pi * static_cast<double>(n) * xi);
            continue;
        }
        const double angle = -2.0 * std::numbers::pi * static_cast<double>(fft::wavenumber(j, n)) * xi;
        c[j] = f.coeffs()[j] * cplx(std::cos(angle), std::sin(angle));
    }
    return PeriodicField::from_coeffs(std::move(c));
}

/// Band-limited resampling onto an m-point grid (zero padding or truncation).
inline PeriodicField resample(const PeriodicField& f, std::size_t m) {
    PeriodicField::check_size(m);
    const std::size_t n = f.size();
    if (m == n) return f;
    std::vector<cplx> c(m);
    const std::size_t keep = std::min(n, m) / 2;
    c[0] = f.coeffs()[0];
    for (std::size_t k = 1; k < keep; ++k) {
        c[k] = f.coeffs()[k];
        c[m - k] = f.coeffs()[n - k];
    }
    if (m > n) {
        // split the old Nyquist cosine evenly between +-n/2
        c[n / 2] = 0.5 * f.coeffs()[n / 2];
        c[m - n / 2] = 0.5 * f.coeffs()[n / 2];
    }
    return PeriodicField::from_coeffs(std::move(c));
}

/**
 * Grid extrema refined by the parabola through the extreme sample and its two
 * neighbours. Ties resolve to the smallest index, so argmax is the first
 * maximizer in [0,1).
 */
inline ExtremaRecord extrema(const PeriodicField& f) {
    const std::size_t n = f.size();
    const auto s = f.samples();
    std::size_t jmax = 0, jmin = 0;
    for (std::size_t j = 1; j < n; ++j) {
        if (s[j] > s[jmax]) jmax = j;
        if (s[j] < s[jmin]) jmin = j;
    }
    auto refine = [&](std::size_t j, bool is_max) -> std::pair<double, double> {
        const double fm = s[(j + n - 1) % n], f0 = s[j], fp = s[(j + 1) % n];
        const double curvature = fm - 2.0 * f0 + fp;
        const bool usable = is_max ? curvature < 0.0 : curvature > 0.0;
        if (!usable) return {f.node(j), f0};
        const double offset = 0.5 * (fm - fp) / curvature;
        const double value = f0 - 0.125 * (fm - fp) * (fm - fp) / curvature;
        return {wrap_unit(f.node(j) + offset * f.spacing()), value};
    };
    ExtremaRecord r;
    std::tie(r.argmax, r.max_value) = refine(jmax, true);
    std::tie(r.argmin, r.min_value) = refine(jmin, false);
    if (r.max_value < r.min_value) r.max_value = r.min_value;
    return r;
}

namespace detail {

// sum_k w(k) f_k conj(g_k) over all slots; real for real fields.
template <class Weight>
double weighted_parseval(const PeriodicField& f, const PeriodicField& g, Weight&& weight) {
    PeriodicField::require_same_grid(f, g);
    const std::size_t n = f.size();
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const double w = weight(j, fft::wavenumber(j, n));
        if (w == 0.0) continue;
        acc += w * (f.coeffs()[j] * std::conj(g.coeffs()[j])).real();
    }
    return acc;
}

inline double derivative_weight(std::size_t j, long k, std::size_t n) {
    if (j == n / 2 || k == 0) return 0.0;
    const double w = 2.0 * std::numbers::pi * static_cast<double>(k);
    return w * w;
}

} // namespace detail

/// <f,g>_mu = mean(f) mean(g) + int f_x g_x.
inline double mu_inner(const PeriodicField& f, const PeriodicField& g) {
    const std::size_t n = f.size();
    PeriodicField::require_same_grid(f, g);
    return mean(f) * mean(g) +
           detail::weighted_parseval(f, g, [n](std::size_t j, long k) { return detail::derivative_weight(j, k, n); });
}

inline double mu_norm(const PeriodicField& f) { return std::sqrt(std::max(0.0, mu_inner(f, f))); }

/// int f^2 + int f_x^2.
inline double h1_norm_sq(const PeriodicField& f) {
    const std::size_t n = f.size();
    return detail::weighted_parseval(
        f, f, [n](std::size_t j, long k) { return 1.0 + detail::derivative_weight(j, k, n); });
}

inline double h1_norm(const PeriodicField& f) { return std::sqrt(std::max(0.0, h1_norm_sq(f))); }

/// int f g (Parseval, equal to the trapezoid rule on the grid).
inline double l2_inner(const PeriodicField& f, const PeriodicField& g) {
    return detail::weighted_parseval(f, g, [](std::size_t, long) { return 1.0; });
}

/// CSV dump with header `x,value`.
inline void write_field_csv(std::ostream& os, const PeriodicField& f) {
    os << "x,value\n";
    char buf[96];
    for (std::size_t j = 0; j < f.size(); ++j) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", f.node(j), f[j]);
        os << buf;
    }
}

} // namespace hmch
