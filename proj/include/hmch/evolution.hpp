#pragma once

#include <hmch/conservation.hpp>
#include <hmch/errors.hpp>
#include <hmch/grid_field.hpp>
#include <hmch/model.hpp>
#include <hmch/mu_operator.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

namespace hmch {

struct SimConfig {
    std::size_t n = 512;
    double t_end = 1.0;
    std::optional<double> dt;
    std::optional<double> cfl;
    ModelParams params;
    bool dealias = true;
    std::size_t record_every = 1;
    /// Seconds; zero disables the guard.
    double wall_clock_limit = 0.0;

    void validate() const {
        PeriodicField::check_size(n);
        if (!(t_end > 0.0)) throw DomainError("t_end must be positive");
        if (dt.has_value() == cfl.has_value()) throw DomainError("exactly one of dt and cfl must be given");
        if (dt && !(*dt > 0.0)) throw DomainError("dt must be positive");
        if (cfl && !(*cfl > 0.0 && *cfl <= 1.0)) throw DomainError("cfl must lie in (0, 1]");
        if (record_every == 0) throw DomainError("record_every must be at least 1");
    }
};

struct BlowUpRecord {
    double time;
    double max_abs;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<PeriodicField> states;
    std::vector<InvariantTriple> invariants;
    double dt = 0.0;
    std::size_t steps = 0;
    std::optional<BlowUpRecord> blowup;
    bool wall_clock_exceeded = false;

    bool complete() const noexcept { return !blowup && !wall_clock_exceeded; }
};

namespace detail {

// Pointwise f(u, u_x) formed on the 2n grid (or the n grid) and restricted to |k| < n/2.
template <class F>
PeriodicField dealiased_product(const PeriodicField& u, const PeriodicField& ux, bool dealias, F&& f) {
    const std::size_t n = u.size();
    if (!dealias) {
        std::vector<double> v(n);
        for (std::size_t j = 0; j < n; ++j) v[j] = f(u[j], ux[j]);
        return PeriodicField::from_samples(std::move(v));
    }
    const auto U = resample(u, 2 * n);
    const auto Ux = resample(ux, 2 * n);
    std::vector<double> v(2 * n);
    for (std::size_t j = 0; j < 2 * n; ++j) v[j] = f(U[j], Ux[j]);
    return resample(PeriodicField::from_samples(std::move(v)), n);
}

template <class Form>
PeriodicField nonlocal_field(const PeriodicField& u, const PeriodicField& ux, const ModelParams& p, bool dealias) {
    const double mu = mean(u);
    return dealiased_product(u, ux, dealias,
                             [&](double v, double vx) { return nonlocal_source<Form>(p, v, vx, mu); });
}

} // namespace detail

/// u_t = -p(u) u_x - phi_x * N(u), with the mean mode projected out.
template <class Form = StandardForm>
PeriodicField rhs(const PeriodicField& u, const ModelParams& params, bool dealias = true) {
    const auto ux = derivative(u);
    const auto local = detail::dealiased_product(
        u, ux, dealias, [&](double v, double vx) { return pointwise_terms(params, v).p * vx; });
    const auto source = detail::nonlocal_field<Form>(u, ux, params, dealias);
    const MuSymbol sym(u.size());
    std::vector<cplx> c(u.size());
    for (std::size_t j = 1; j < c.size(); ++j) c[j] = -local.coeffs()[j] - sym.phi_x_symbol(j) * source.coeffs()[j];
    return PeriodicField::from_coeffs(std::move(c));
}

/// One classical RK4 step of u' = f(u).
template <class F>
PeriodicField rk4_step(const PeriodicField& u, double dt, F&& f) {
    const auto k1 = f(u);
    const auto k2 = f(PeriodicField::combine(u, k1, 1.0, 0.5 * dt));
    const auto k3 = f(PeriodicField::combine(u, k2, 1.0, 0.5 * dt));
    const auto k4 = f(PeriodicField::combine(u, k3, 1.0, dt));
    const auto s = PeriodicField::combine(PeriodicField::combine(k1, k4, 1.0, 1.0),
                                          PeriodicField::combine(k2, k3, 1.0, 1.0), 1.0, 2.0);
    return PeriodicField::combine(u, s, 1.0, dt / 6.0);
}

/// Throws BlowUpError (stamped with t0 + dt) on a non-finite result.
template <class Form = StandardForm>
PeriodicField step_rk4(const PeriodicField& u, double dt, const ModelParams& params, bool dealias = true,
                       double t0 = 0.0) {
    if (!(dt > 0.0)) throw DomainError("step_rk4: dt must be positive");
    auto next = rk4_step(u, dt, [&](const PeriodicField& v) { return rhs<Form>(v, params, dealias); });
    if (!next.all_finite()) {
        double m = u.max_abs();
        for (double v : next.samples())
            if (std::isfinite(v)) m = std::max(m, std::abs(v));
        throw BlowUpError(t0 + dt, m);
    }
    return next;
}

/// cfl dx / max(1, max |p(u0)|), or the fixed dt.
inline double initial_time_step(const PeriodicField& u0, const SimConfig& cfg) {
    if (cfg.dt) return *cfg.dt;
    double speed = 1.0;
    for (double v : u0.samples()) speed = std::max(speed, std::abs(pointwise_terms(cfg.params, v).p));
    return *cfg.cfl * u0.spacing() / speed;
}

/**
 * Fixed-step RK4. The step is shrunk so that an integer number of steps lands
 * on t_end. Invariants are always those of the standard equation, whatever Form
 * drives the dynamics.
 */
template <class Form = StandardForm>
Trajectory evolve(const PeriodicField& u0, const SimConfig& cfg) {
    cfg.validate();
    if (u0.size() != cfg.n) throw DimensionError("initial field does not match the configured grid");
    const double dt0 = initial_time_step(u0, cfg);
    const auto steps = static_cast<std::size_t>(std::ceil(cfg.t_end / dt0 - 1e-9));
    Trajectory traj;
    traj.steps = std::max<std::size_t>(steps, 1);
    traj.dt = cfg.t_end / static_cast<double>(traj.steps);

    auto record = [&](double t, const PeriodicField& u) {
        traj.times.push_back(t);
        traj.states.push_back(u);
        traj.invariants.push_back(invariants(u, cfg.params));
    };
    const auto start = std::chrono::steady_clock::now();
    PeriodicField u = u0;
    record(0.0, u);
    for (std::size_t s = 1; s <= traj.steps; ++s) {
        const double t0 = static_cast<double>(s - 1) * traj.dt;
        try {
            u = step_rk4<Form>(u, traj.dt, cfg.params, cfg.dealias, t0);
        } catch (const BlowUpError& e) {
            traj.blowup = BlowUpRecord{e.time(), e.max_abs()};
            return traj;
        }
        if (s % cfg.record_every == 0 || s == traj.steps) record(static_cast<double>(s) * traj.dt, u);
        if (cfg.wall_clock_limit > 0.0) {
            const std::chrono::duration<double> el = std::chrono::steady_clock::now() - start;
            if (el.count() > cfg.wall_clock_limit) {
                if (traj.times.back() != static_cast<double>(s) * traj.dt) record(static_cast<double>(s) * traj.dt, u);
                traj.wall_clock_exceeded = true;
                return traj;
            }
        }
    }
    return traj;
}

/// Largest relative drift |q(t) - q(0)| / |q(0)| of each invariant over a trajectory.
inline InvariantTriple relative_drift(const Trajectory& traj) {
    InvariantTriple d;
    if (traj.invariants.empty()) return d;
    const auto& r = traj.invariants.front();
    auto rel = [](double v, double ref) { return std::abs(v - ref) / std::max(std::abs(ref), 1e-300); };
    for (const auto& v : traj.invariants) {
        d.h0 = std::max(d.h0, rel(v.h0, r.h0));
        d.h1 = std::max(d.h1, rel(v.h1, r.h1));
        d.h2 = std::max(d.h2, rel(v.h2, r.h2));
        d.i2 = std::max(d.i2, rel(v.i2, r.i2));
        d.i3 = std::max(d.i3, rel(v.i3, r.i3));
    }
    return d;
}

/// A smooth test function psi(t, x) and its x-derivative; psi(t_end, .) = 0.
struct SpaceTimeTest {
    std::function<double(double, double)> value;
    std::function<double(double, double)> d_x;
};

/**
 * Absolute value of
 *   int int [ -u psi_t - F(u) psi_x + (phi_x * N(u)) psi ] dx dt - int u(0) psi(0) dx,
 * F' = p. Zero for a weak solution on [0, t_end] when psi vanishes at t_end.
 * Space is the grid mean. In time the psi_t term is integrated cell by cell as
 * the mean of u at the cell ends times the exact increment of psi, which makes
 * the residual of a steady state vanish; the other terms use the trapezoid rule.
 */
template <class Form = StandardForm>
double weak_residual(const Trajectory& traj, const SpaceTimeTest& psi, const ModelParams& params,
                     bool dealias = true) {
    if (traj.states.empty()) throw DomainError("weak_residual: empty trajectory");
    const std::size_t nt = traj.states.size();
    const std::size_t n = traj.states.front().size();
    const double dn = static_cast<double>(n);
    std::vector<double> slab(nt);
    std::vector<std::vector<double>> psi_at(nt, std::vector<double>(n));
    for (std::size_t i = 0; i < nt; ++i) {
        const auto& u = traj.states[i];
        if (u.size() != n) throw DimensionError("weak_residual: snapshots on different grids");
        const double t = traj.times[i];
        const auto conv = convolve_phi_x(detail::nonlocal_field<Form>(u, derivative(u), params, dealias));
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double x = u.node(j);
            psi_at[i][j] = psi.value(t, x);
            acc += -flux_primitive(params, u[j]) * psi.d_x(t, x) + conv[j] * psi_at[i][j];
        }
        slab[i] = acc / dn;
    }
    double integral = 0.0;
    for (std::size_t i = 0; i + 1 < nt; ++i) {
        integral += 0.5 * (slab[i] + slab[i + 1]) * (traj.times[i + 1] - traj.times[i]);
        const auto& a = traj.states[i];
        const auto& b = traj.states[i + 1];
        double transport = 0.0;
        for (std::size_t j = 0; j < n; ++j) transport -= 0.5 * (a[j] + b[j]) * (psi_at[i + 1][j] - psi_at[i][j]);
        integral += transport / dn;
    }
    const auto& u0 = traj.states.front();
    double initial = 0.0;
    for (std::size_t j = 0; j < n; ++j) initial += u0[j] * psi_at[0][j];
    initial /= dn;
    return std::abs(integral - initial);
}

} // namespace hmch
