#pragma once

#include <hmch/errors.hpp>

#include <bit>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <unordered_map>
#include <vector>

namespace hmch::fft {

using cplx = std::complex<double>;

inline bool is_power_of_two(std::size_t n) noexcept { return n != 0 && std::has_single_bit(n); }

namespace detail {

// Per-size tables: twiddles e^{-2 pi i j / n} for j < n/2, each evaluated directly
// (no recurrence) so the round trip stays at a few ulp for large n, and the
// bit-reversal permutation.
struct Plan {
    std::vector<cplx> twiddles;
    std::vector<std::size_t> bitrev;
};

inline const Plan& plan(std::size_t n) {
    thread_local std::unordered_map<std::size_t, Plan> cache;
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    Plan p;
    p.twiddles.resize(n / 2);
    for (std::size_t j = 0; j < n / 2; ++j) {
        const double angle = -2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(n);
        p.twiddles[j] = {std::cos(angle), std::sin(angle)};
    }
    const int bits = std::countr_zero(n);
    p.bitrev.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t r = 0;
        for (int b = 0; b < bits; ++b)
            if (i & (std::size_t{1} << b)) r |= std::size_t{1} << (bits - 1 - b);
        p.bitrev[i] = r;
    }
    return cache.emplace(n, std::move(p)).first->second;
}

inline void transform_in_place(std::vector<cplx>& a, bool inverse) {
    const std::size_t n = a.size();
    if (!is_power_of_two(n)) throw DimensionError("fft: size must be a power of two");
    const Plan& p = plan(n);
    for (std::size_t i = 0; i < n; ++i)
        if (i < p.bitrev[i]) std::swap(a[i], a[p.bitrev[i]]);
    const auto& w = p.twiddles;
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const std::size_t half = len / 2;
        const std::size_t stride = n / len;
        for (std::size_t start = 0; start < n; start += len) {
            for (std::size_t j = 0; j < half; ++j) {
                const cplx tw = w[j * stride];
                const double ti = inverse ? -tw.imag() : tw.imag();
                const cplx b = a[start + j + half];
                // plain product; std::complex operator* takes the slow Annex G path
                const cplx v{b.real() * tw.real() - b.imag() * ti, b.real() * ti + b.imag() * tw.real()};
                a[start + j + half] = a[start + j] - v;
                a[start + j] += v;
            }
        }
    }
}

} // namespace detail

/// Normalized forward transform: c_k = (1/n) sum_j f_j exp(-2 pi i j k / n).
inline std::vector<cplx> forward(std::span<const double> samples) {
    std::vector<cplx> a(samples.begin(), samples.end());
    detail::transform_in_place(a, false);
    const double scale = 1.0 / static_cast<double>(a.size());
    for (auto& v : a) v *= scale;
    return a;
}

inline std::vector<cplx> forward(std::span<const cplx> values) {
    std::vector<cplx> a(values.begin(), values.end());
    detail::transform_in_place(a, false);
    const double scale = 1.0 / static_cast<double>(a.size());
    for (auto& v : a) v *= scale;
    return a;
}

/// Synthesis: f_j = sum_k c_k exp(+2 pi i j k / n).
inline std::vector<cplx> inverse(std::span<const cplx> coeffs) {
    std::vector<cplx> a(coeffs.begin(), coeffs.end());
    detail::transform_in_place(a, true);
    return a;
}

/// Signed wavenumber of FFT slot j on an n-point grid; the Nyquist slot maps to +n/2.
inline long wavenumber(std::size_t j, std::size_t n) noexcept {
    return j <= n / 2 ? static_cast<long>(j) : static_cast<long>(j) - static_cast<long>(n);
}

} // namespace hmch::fft
