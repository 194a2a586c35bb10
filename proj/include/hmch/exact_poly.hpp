#pragma once

#include <hmch/errors.hpp>
#include <hmch/grid_field.hpp>

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cstddef>
#include <regex>
#include <string>
#include <utility>
#include <vector>

namespace hmch {

// expression templates off so std::min/max and auto behave like a value type
using Rational = boost::multiprecision::number<boost::multiprecision::cpp_rational_backend,
                                               boost::multiprecision::et_off>;

inline Rational rat(long num, long den = 1) { return Rational(num, den); }

inline std::string to_string(const Rational& r) { return r.str(); }

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

/// Parses "p", "p/q", or a decimal with optional exponent ("1.25", "1e-3") into an exact rational.
inline Rational parse_rational(const std::string& text) {
    using boost::multiprecision::cpp_int;
    static const std::regex fraction(R"(\s*([+-]?\d+)\s*/\s*(\d+)\s*)");
    static const std::regex decimal(R"(\s*([+-]?)(\d*)(?:\.(\d*))?(?:[eE]([+-]?\d+))?\s*)");
    std::smatch m;
    if (std::regex_match(text, m, fraction)) {
        auto strip = [](std::string d) {
            const std::size_t sign = (d[0] == '+' || d[0] == '-') ? 1 : 0;
            const auto first = d.find_first_not_of('0', sign);
            d.erase(sign, (first == std::string::npos ? d.size() : first) - sign);
            if (d.size() == sign) d += '0';
            return d[0] == '+' ? d.substr(1) : d;
        };
        const cpp_int den(strip(m[2].str()));
        if (den == 0) throw DomainError("parse_rational: zero denominator in '" + text + "'");
        return Rational(cpp_int(strip(m[1].str())), den);
    }
    if (!std::regex_match(text, m, decimal) || (m[2].length() == 0 && m[3].length() == 0))
        throw DomainError("parse_rational: not a number: '" + text + "'");
    std::string digits = m[2].str() + m[3].str();
    // cpp_int reads a leading 0 as an octal prefix
    digits.erase(0, std::min(digits.find_first_not_of('0'), digits.size()));
    Rational r(cpp_int(digits.empty() ? "0" : digits));
    long exponent = m[4].matched ? std::stol(m[4].str()) : 0;
    exponent -= static_cast<long>(m[3].length());
    if (std::abs(exponent) > 4000) throw DomainError("parse_rational: exponent out of range in '" + text + "'");
    const cpp_int scale = boost::multiprecision::pow(cpp_int(10), static_cast<unsigned>(std::abs(exponent)));
    r = exponent >= 0 ? r * Rational(scale) : r / Rational(scale);
    return m[1].str() == "-" ? -r : r;
}

/// Dense polynomial with rational coefficients, ascending powers.
class Polynomial {
public:
    Polynomial() = default;
    explicit Polynomial(std::vector<Rational> c) : c_(std::move(c)) { trim(); }
    static Polynomial constant(const Rational& v) { return Polynomial({v}); }
    static Polynomial monomial(std::size_t degree, const Rational& coeff = 1) {
        std::vector<Rational> c(degree + 1);
        c[degree] = coeff;
        return Polynomial(std::move(c));
    }

    const std::vector<Rational>& coeffs() const noexcept { return c_; }
    bool is_zero() const noexcept { return c_.empty(); }
    int degree() const noexcept { return static_cast<int>(c_.size()) - 1; }

    Rational operator()(const Rational& x) const {
        Rational acc = 0;
        for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + *it;
        return acc;
    }

    Polynomial derivative() const {
        if (c_.size() <= 1) return {};
        std::vector<Rational> d(c_.size() - 1);
        for (std::size_t i = 1; i < c_.size(); ++i) d[i - 1] = c_[i] * static_cast<long>(i);
        return Polynomial(std::move(d));
    }

    Polynomial antiderivative() const {
        std::vector<Rational> a(c_.size() + 1);
        for (std::size_t i = 0; i < c_.size(); ++i) a[i + 1] = c_[i] / static_cast<long>(i + 1);
        return Polynomial(std::move(a));
    }

    /// q(x) = p(x - s).
    Polynomial shifted(const Rational& s) const {
        Polynomial acc;
        const Polynomial lin({-s, Rational(1)});
        for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * lin + constant(*it);
        return acc;
    }

    friend Polynomial operator+(const Polynomial& a, const Polynomial& b) {
        std::vector<Rational> c(std::max(a.c_.size(), b.c_.size()));
        for (std::size_t i = 0; i < a.c_.size(); ++i) c[i] += a.c_[i];
        for (std::size_t i = 0; i < b.c_.size(); ++i) c[i] += b.c_[i];
        return Polynomial(std::move(c));
    }
    friend Polynomial operator-(const Polynomial& a, const Polynomial& b) { return a + b * Rational(-1); }
    friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
        if (a.is_zero() || b.is_zero()) return {};
        std::vector<Rational> c(a.c_.size() + b.c_.size() - 1);
        for (std::size_t i = 0; i < a.c_.size(); ++i)
            for (std::size_t j = 0; j < b.c_.size(); ++j) c[i + j] += a.c_[i] * b.c_[j];
        return Polynomial(std::move(c));
    }
    friend Polynomial operator*(const Polynomial& a, const Rational& s) {
        std::vector<Rational> c(a.c_);
        for (auto& v : c) v *= s;
        return Polynomial(std::move(c));
    }
    friend bool operator==(const Polynomial& a, const Polynomial& b) { return a.c_ == b.c_; }

private:
    void trim() {
        while (!c_.empty() && c_.back() == 0) c_.pop_back();
    }
    std::vector<Rational> c_;
};

/**
 * Exact piecewise polynomial over one period [b_0, b_0 + 1). Piece i lives on
 * [b_i, b_{i+1}); continuity across breakpoints is not required and jumps of
 * derivatives are never represented as delta terms.
 */
class RationalPiecewise {
public:
    RationalPiecewise(std::vector<Rational> breakpoints, std::vector<Polynomial> pieces)
        : b_(std::move(breakpoints)), p_(std::move(pieces)) {
        if (b_.size() < 2 || p_.size() + 1 != b_.size())
            throw DomainError("RationalPiecewise: need k+1 breakpoints for k pieces");
        for (std::size_t i = 0; i + 1 < b_.size(); ++i)
            if (!(b_[i] < b_[i + 1])) throw DomainError("RationalPiecewise: breakpoints must increase strictly");
        if (b_.back() - b_.front() != 1) throw DomainError("RationalPiecewise: span must be exactly one period");
    }

    static RationalPiecewise constant(const Rational& v, const Rational& start = rat(-1, 2)) {
        return RationalPiecewise({start, start + 1}, {Polynomial::constant(v)});
    }

    const std::vector<Rational>& breakpoints() const noexcept { return b_; }
    const std::vector<Polynomial>& pieces() const noexcept { return p_; }
    const Rational& start() const noexcept { return b_.front(); }

    /// Value at x reduced into [b_0, b_0 + 1); a breakpoint takes the piece to its right.
    Rational operator()(const Rational& x) const {
        const Rational y = reduce(x);
        auto it = std::upper_bound(b_.begin(), b_.end(), y);
        std::size_t i = static_cast<std::size_t>(std::distance(b_.begin(), it)) - 1;
        if (i >= p_.size()) i = p_.size() - 1;
        return p_[i](y);
    }

    Rational reduce(const Rational& x) const {
        Rational t = x - start();
        const boost::multiprecision::cpp_int fl = floor_int(t);
        return x - Rational(fl);
    }

    /// Same function on a partition starting at new_start; pieces crossing it are split.
    RationalPiecewise rebased(const Rational& new_start) const {
        const Rational s = reduce(new_start);
        std::vector<Rational> nb{s};
        std::vector<Polynomial> np;
        // walk the pieces from s to the end, then wrap with a +1 shift
        for (int pass = 0; pass < 2; ++pass) {
            const Rational offset = pass == 0 ? Rational(0) : Rational(1);
            for (std::size_t i = 0; i < p_.size(); ++i) {
                const Rational lo = std::max(b_[i] + offset, s);
                const Rational hi = std::min(b_[i + 1] + offset, s + 1);
                if (!(lo < hi)) continue;
                np.push_back(pass == 0 ? p_[i] : p_[i].shifted(offset));
                nb.push_back(hi);
            }
        }
        return RationalPiecewise(std::move(nb), std::move(np));
    }

    /// x -> f(x - s), kept on the same period start.
    RationalPiecewise shifted(const Rational& s) const {
        std::vector<Rational> nb(b_.size());
        std::vector<Polynomial> np(p_.size());
        for (std::size_t i = 0; i < b_.size(); ++i) nb[i] = b_[i] + s;
        for (std::size_t i = 0; i < p_.size(); ++i) np[i] = p_[i].shifted(s);
        return RationalPiecewise(std::move(nb), std::move(np)).rebased(start());
    }

private:
    static boost::multiprecision::cpp_int floor_int(const Rational& t) {
        boost::multiprecision::cpp_int q = numerator(t) / denominator(t);
        if (t < 0 && Rational(q) != t) q -= 1;
        return q;
    }

    std::vector<Rational> b_;
    std::vector<Polynomial> p_;
};

namespace detail {

inline RationalPiecewise on_common_partition(const RationalPiecewise& p, const std::vector<Rational>& bps) {
    std::vector<Polynomial> pieces;
    for (std::size_t i = 0; i + 1 < bps.size(); ++i) {
        const Rational mid = (bps[i] + bps[i + 1]) / 2;
        const Rational y = p.reduce(mid);
        auto it = std::upper_bound(p.breakpoints().begin(), p.breakpoints().end(), y);
        std::size_t k = static_cast<std::size_t>(std::distance(p.breakpoints().begin(), it)) - 1;
        Polynomial piece = p.pieces()[k];
        // a piece reached through the wrap needs its variable shifted by one period
        const Rational wrap = mid - y;
        pieces.push_back(wrap == 0 ? piece : piece.shifted(wrap));
    }
    return RationalPiecewise(bps, std::move(pieces));
}

template <class Op>
RationalPiecewise combine(const RationalPiecewise& p, const RationalPiecewise& q, Op op) {
    const RationalPiecewise qq = q.start() == p.start() ? q : q.rebased(p.start());
    std::vector<Rational> bps = p.breakpoints();
    bps.insert(bps.end(), qq.breakpoints().begin(), qq.breakpoints().end());
    std::sort(bps.begin(), bps.end());
    bps.erase(std::unique(bps.begin(), bps.end()), bps.end());
    const auto pa = on_common_partition(p, bps);
    const auto qa = on_common_partition(qq, bps);
    std::vector<Polynomial> out(pa.pieces().size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = op(pa.pieces()[i], qa.pieces()[i]);
    return RationalPiecewise(std::move(bps), std::move(out));
}

} // namespace detail

/// Exact integral over one period.
inline Rational integrate_period(const RationalPiecewise& p) {
    Rational total = 0;
    const auto& b = p.breakpoints();
    for (std::size_t i = 0; i < p.pieces().size(); ++i) {
        const Polynomial anti = p.pieces()[i].antiderivative();
        total += anti(b[i + 1]) - anti(b[i]);
    }
    return total;
}

/// Exact product on the union of both partitions.
inline RationalPiecewise poly_mul(const RationalPiecewise& p, const RationalPiecewise& q) {
    return detail::combine(p, q, [](const Polynomial& a, const Polynomial& b) { return a * b; });
}

inline RationalPiecewise poly_add(const RationalPiecewise& p, const RationalPiecewise& q) {
    return detail::combine(p, q, [](const Polynomial& a, const Polynomial& b) { return a + b; });
}

inline RationalPiecewise poly_scale(const RationalPiecewise& p, const Rational& s) {
    std::vector<Polynomial> pieces;
    for (const auto& piece : p.pieces()) pieces.push_back(piece * s);
    return RationalPiecewise(p.breakpoints(), std::move(pieces));
}

inline RationalPiecewise poly_pow(const RationalPiecewise& p, unsigned e) {
    RationalPiecewise acc = RationalPiecewise::constant(1, p.start());
    for (unsigned i = 0; i < e; ++i) acc = poly_mul(acc, p);
    return acc;
}

/// Classical derivative on each piece.
inline RationalPiecewise poly_derivative(const RationalPiecewise& p) {
    std::vector<Polynomial> pieces;
    for (const auto& piece : p.pieces()) pieces.push_back(piece.derivative());
    return RationalPiecewise(p.breakpoints(), std::move(pieces));
}

/// Point samples at x_j = j/n.
inline PeriodicField sample(const RationalPiecewise& p, std::size_t n) {
    PeriodicField::check_size(n);
    std::vector<double> s(n);
    for (std::size_t j = 0; j < n; ++j) s[j] = to_double(p(Rational(static_cast<long>(j), static_cast<long>(n))));
    return PeriodicField::from_samples(std::move(s));
}

/// a (x^2 + 23/12) / 2 on [-1/2, 1/2): the periodic peakon, peak at x = 1/2.
inline RationalPiecewise peakon_profile_exact(const Rational& a) {
    return RationalPiecewise({rat(-1, 2), rat(1, 2)},
                             {Polynomial({a * rat(23, 24), Rational(0), a / 2})});
}

/// Green's function of mu - d_xx on [0, 1): (x - 1/2)^2 / 2 + 23/24.
inline RationalPiecewise green_function_exact() {
    return peakon_profile_exact(1).shifted(rat(1, 2)).rebased(0);
}

/// Exact model coefficients.
struct RationalParams {
    Rational a1 = 0, a2 = 0, a3 = 0;
};

struct ExactInvariants {
    Rational h0, h1, h2, i2, i3;
};

/**
 * H0, H1, H2 and the moments int phi^2, int phi^3 of the peakon with amplitude
 * a, built integrand by integrand from the exact profile.
 */
inline ExactInvariants peakon_invariants_exact(const Rational& a, const RationalParams& params) {
    if (!(a > 0)) throw DomainError("peakon_invariants_exact: amplitude must be positive");
    const auto phi = peakon_profile_exact(a);
    const auto phi_x = poly_derivative(phi);
    const Rational mu = integrate_period(phi);
    const auto phi_x2 = poly_mul(phi_x, phi_x);

    ExactInvariants out;
    out.h0 = mu;
    out.h1 = (integrate_period(phi_x2) + mu * mu) / 2;
    out.i2 = integrate_period(poly_pow(phi, 2));
    out.i3 = integrate_period(poly_pow(phi, 3));

    const Rational coeff[3] = {params.a1, params.a2, params.a3};
    // sum_i a_i phi^i (2 mu phi + phi_x^2)
    const auto inner = poly_add(poly_scale(phi, 2 * mu), phi_x2);
    RationalPiecewise local = RationalPiecewise::constant(0, phi.start());
    for (unsigned i = 1; i <= 3; ++i)
        local = poly_add(local, poly_scale(poly_mul(poly_pow(phi, i), inner), coeff[i - 1]));
    // (23/12) mu^2 sum_{i=1}^{2} a_{i+1} phi^{i+1}
    RationalPiecewise mean_part = RationalPiecewise::constant(0, phi.start());
    for (unsigned i = 1; i <= 2; ++i) mean_part = poly_add(mean_part, poly_scale(poly_pow(phi, i + 1), coeff[i]));
    mean_part = poly_scale(mean_part, rat(23, 12) * mu * mu);
    out.h2 = integrate_period(poly_add(local, poly_scale(mean_part, -1))) / 2;
    return out;
}

} // namespace hmch
