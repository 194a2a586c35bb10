#pragma once

#include <hmch/grid_field.hpp>

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <vector>

namespace hmch {

/// Fourier symbol of A^{-1} for A = mu - d_xx: 1 at k = 0, 1/(4 pi^2 k^2) elsewhere.
class MuSymbol {
public:
    explicit MuSymbol(std::size_t n) : inv_(n) {
        PeriodicField::check_size(n);
        inv_[0] = 1.0;
        for (std::size_t j = 1; j < n; ++j) {
            const double w = 2.0 * std::numbers::pi * static_cast<double>(fft::wavenumber(j, n));
            inv_[j] = 1.0 / (w * w);
        }
    }

    std::size_t size() const noexcept { return inv_.size(); }
    double inverse_symbol(std::size_t j) const noexcept { return inv_[j]; }

    /// Symbol of A: mean projection at k = 0, 4 pi^2 k^2 elsewhere.
    double symbol(std::size_t j) const noexcept { return j == 0 ? 1.0 : 1.0 / inv_[j]; }

    /// Symbol of d_x A^{-1}: i/(2 pi k), zero at k = 0 and at the Nyquist slot.
    cplx phi_x_symbol(std::size_t j) const noexcept {
        const std::size_t n = size();
        if (j == 0 || j == n / 2) return 0.0;
        return {0.0, 1.0 / (2.0 * std::numbers::pi * static_cast<double>(fft::wavenumber(j, n)))};
    }

private:
    std::vector<double> inv_;
};

namespace detail {

template <class Sym>
PeriodicField multiply_symbol(const PeriodicField& f, Sym&& sym) {
    std::vector<cplx> c(f.coeffs().begin(), f.coeffs().end());
    for (std::size_t j = 0; j < c.size(); ++j) c[j] *= sym(j);
    return PeriodicField::from_coeffs(std::move(c));
}

} // namespace detail

inline PeriodicField apply_A(const PeriodicField& f) {
    const MuSymbol s(f.size());
    return detail::multiply_symbol(f, [&](std::size_t j) { return cplx(s.symbol(j)); });
}

/// Circular convolution with phi(x) = (x - 1/2)^2/2 + 23/24.
inline PeriodicField invert_A(const PeriodicField& f) {
    const MuSymbol s(f.size());
    return detail::multiply_symbol(f, [&](std::size_t j) { return cplx(s.inverse_symbol(j)); });
}

/// phi_x * f, i.e. d_x A^{-1} f; annihilates constants.
inline PeriodicField convolve_phi_x(const PeriodicField& f) {
    const MuSymbol s(f.size());
    return detail::multiply_symbol(f, [&](std::size_t j) { return s.phi_x_symbol(j); });
}

} // namespace hmch
