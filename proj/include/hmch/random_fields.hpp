#pragma once

#include <hmch/errors.hpp>
#include <hmch/grid_field.hpp>
#include <hmch/model.hpp>
#include <hmch/peakon.hpp>

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

namespace hmch {

using Rng = std::mt19937_64;

struct RandomFieldSpec {
    std::size_t modes = 16;      // K: wavenumbers 1..K
    double amplitude = 1.0;      // scale of mode 1; mode k scaled by 1/k^2
    double mean_offset = 0.0;    // added to the k = 0 coefficient
};

/// Band-limited real field with modes 1..K, complex normal coefficients decaying like 1/k^2.
inline PeriodicField random_band_limited(std::size_t n, const RandomFieldSpec& spec, Rng& rng) {
    PeriodicField::check_size(n);
    if (spec.modes == 0 || spec.modes >= n / 2) throw DimensionError("random field modes must lie in [1, n/2)");
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<cplx> c(n);
    c[0] = spec.mean_offset;
    for (std::size_t k = 1; k <= spec.modes; ++k) {
        const double scale = spec.amplitude / static_cast<double>(k * k);
        const double re = normal(rng), im = normal(rng);
        c[k] = scale * cplx(re, im);
        c[n - k] = std::conj(c[k]);
    }
    return PeriodicField::from_coeffs(std::move(c));
}

/// Random field shifted so that min u >= floor > 0 (hence mu > 0 and m_u > 0).
inline PeriodicField random_positive_field(std::size_t n, const RandomFieldSpec& spec, double floor, Rng& rng) {
    auto base = random_band_limited(n, RandomFieldSpec{spec.modes, spec.amplitude, 0.0}, rng);
    std::uniform_real_distribution<double> lift(0.0, 1.0);
    const double shift = floor - extrema(base).min_value + lift(rng) + spec.mean_offset;
    return base + PeriodicField::constant(n, shift);
}

/// Random parameters strictly inside one regime for amplitude a.
inline ModelParams sample_params(Regime regime, double a, Rng& rng) {
    std::uniform_real_distribution<double> pos(0.1, 2.0);
    std::uniform_real_distribution<double> frac(0.01, 0.99);
    std::uniform_real_distribution<double> margin(0.01, 2.0);
    ModelParams p;
    switch (regime) {
    case Regime::i:
        p = {pos(rng), pos(rng), pos(rng)};
        break;
    case Regime::ii:
        p.a1 = pos(rng);
        p.a3 = pos(rng);
        p.a2 = -frac(rng) * std::sqrt(3.0 * p.a1 * p.a3);
        break;
    case Regime::iii:
        p.a1 = pos(rng);
        p.a2 = -6.0 * p.a1 / (13.0 * a) + margin(rng);
        break;
    case Regime::iv:
        p.a2 = pos(rng);
        break;
    case Regime::v:
        p.a1 = -pos(rng);
        p.a2 = -p.a1 / (2.0 * a) + margin(rng);
        break;
    case Regime::none:
        throw DomainError("sample_params: no parameters to sample for regime none");
    }
    return p;
}

} // namespace hmch
