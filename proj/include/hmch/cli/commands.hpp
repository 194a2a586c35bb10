#pragma once

#include <hmch/cli/config.hpp>
#include <hmch/cli/report.hpp>
#include <hmch/evolution.hpp>
#include <hmch/peakon.hpp>
#include <hmch/stability.hpp>
#include <hmch/verify.hpp>

#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace hmch::cli {

enum ExitCode : int { kOk = 0, kFailed = 1, kConfigError = 2, kBlowUp = 3 };

struct CommonOptions {
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed;
    bool json = false;
};

namespace detail {

inline std::filesystem::path prepare_out_dir(const CommonOptions& opts) {
    std::filesystem::path dir(opts.out_dir);
    std::filesystem::create_directories(dir);
    return dir;
}

// Writes the manifest and returns its exit code.
inline int finish(const std::filesystem::path& dir, const std::string& stem, RunManifest& m) {
    m.passed = m.exit_code == kOk;
    const auto path = dir / (stem + "_manifest.json");
    write_json_file(path, m.to_json());
    return m.exit_code;
}

inline json invariants_json(const InvariantTriple& t) {
    return {{"h0", num(t.h0)}, {"h1", num(t.h1)}, {"h2", num(t.h2)}, {"i2", num(t.i2)}, {"i3", num(t.i3)}};
}

inline json exact_value(const std::optional<Rational>& exact, double value) {
    return {{"exact", exact ? json(to_string(*exact)) : json(nullptr)}, {"float", num(value)}};
}

} // namespace detail

// ------------------------------------------------------------------ verify

template <class Form = StandardForm>
int cmd_verify(const CommonOptions& opts, std::ostream& out) {
    const auto dir = detail::prepare_out_dir(opts);
    RunManifest m;
    m.command = "verify";
    m.config["seed"] = std::to_string(opts.seed.value_or(0));
    const auto checks = run_identity_suite<Form>(opts.seed.value_or(0));
    const bool ok = all_passed(checks);
    std::vector<std::string> failing;
    for (const auto& c : checks)
        if (!c.passed) failing.push_back(c.name);
    if (opts.json) {
        json j;
        j["passed"] = ok;
        j["seed"] = opts.seed.value_or(0);
        j["checks"] = json::array();
        for (const auto& c : checks)
            j["checks"].push_back({{"name", c.name},
                                   {"expected", c.expected},
                                   {"computed", c.computed},
                                   {"passed", c.passed},
                                   {"error", num(c.error)}});
        out << j.dump(2) << '\n';
    } else {
        for (const auto& c : checks) {
            out << c.name << " = " << c.computed << (c.passed ? " OK" : " FAIL") << "  (expected " << c.expected
                << ")\n";
        }
        out << (ok ? "all identities hold\n" : "FAILED: ");
        for (std::size_t i = 0; i < failing.size(); ++i) out << (i ? ", " : "") << failing[i];
        if (!ok) out << '\n';
    }
    m.exit_code = ok ? kOk : kFailed;
    m.summary = ok ? "all " + std::to_string(checks.size()) + " identities hold"
                   : std::to_string(failing.size()) + " identities failed";
    m.extra["failing"] = failing;
    return detail::finish(dir, "verify", m);
}

// ------------------------------------------------------------------ peakon

struct PeakonArgs {
    std::string a1 = "0", a2 = "0", a3 = "0";
    std::optional<std::string> speed;
    std::optional<std::string> amp;
    std::size_t n = 256;
};

inline int cmd_peakon(const CommonOptions& opts, const PeakonArgs& args, std::ostream& out, std::ostream& err) {
    const auto dir = detail::prepare_out_dir(opts);
    RunManifest m;
    m.command = "peakon";
    m.config = {{"a1", args.a1}, {"a2", args.a2}, {"a3", args.a3}, {"n", std::to_string(args.n)}};
    if (args.speed) m.config["speed"] = *args.speed;
    if (args.amp) m.config["amp"] = *args.amp;
    try {
        if (args.speed.has_value() == args.amp.has_value())
            throw ConfigError(args.amp ? "speed" : "amp", "give exactly one of --speed and --amp");
        auto parse = [](const std::string& key, const std::string& text) {
            try {
                return parse_rational(text);
            } catch (const std::exception&) {
                throw ConfigError(key, "expected a rational number, got '" + text + "'");
            }
        };
        const RationalParams rp{parse("a1", args.a1), parse("a2", args.a2), parse("a3", args.a3)};
        const ModelParams p{to_double(rp.a1), to_double(rp.a2), to_double(rp.a3)};
        if (p.degenerate()) throw ConfigError("a1", "at least one coefficient must be nonzero");
        if (args.n < kMinGridSize || !fft::is_power_of_two(args.n))
            throw ConfigError("n", "must be a power of two >= 16");

        std::optional<Rational> a_exact, c_exact;
        double a = 0.0, c = 0.0;
        std::vector<double> roots;
        if (args.amp) {
            a_exact = parse("amp", *args.amp);
            a = to_double(*a_exact);
            if (!(a > 0.0)) throw ConfigError("amp", "must be positive");
            c = speed_from_amplitude(p, a);
            c_exact = (rp.a1 * 1872 * *a_exact + rp.a2 * 2028 * *a_exact * *a_exact +
                       rp.a3 * 2197 * *a_exact * *a_exact * *a_exact) / 1728;
            roots = {a};
        } else {
            c_exact = parse("speed", *args.speed);
            c = to_double(*c_exact);
            roots = amplitude_from_speed(p, c);
            try {
                a = smallest_positive_amplitude(p, c);
            } catch (const DomainError& e) {
                throw ConfigError("speed", e.what());
            }
            if (rp.a2 == 0 && rp.a3 == 0) {
                a_exact = 12 * *c_exact / (13 * rp.a1);
                a = to_double(*a_exact);
            }
        }

        const auto profile = build_peakon(p, a, args.n);
        const auto regime = classify_regime(p, a);
        std::optional<ExactInvariants> ex;
        if (a_exact) ex = closed_form_invariants_exact(rp, *a_exact);
        const auto cf = closed_form_invariants(p, a);

        const auto csv = dir / "peakon_profile.csv";
        {
            std::ofstream os(csv, std::ios::binary);
            write_field_csv(os, profile.samples);
        }
        m.outputs.push_back(csv.string());

        json j;
        j["a"] = num(a);
        j["a_exact"] = a_exact ? json(to_string(*a_exact)) : json(nullptr);
        j["c"] = num(c);
        j["c_exact"] = c_exact ? json(to_string(*c_exact)) : json(nullptr);
        j["roots"] = roots;
        j["selection"] = "smallest positive root";
        j["regime"] = to_string(regime);
        j["H0"] = detail::exact_value(ex ? std::optional<Rational>(ex->h0) : std::nullopt, cf.h0);
        j["H1"] = detail::exact_value(ex ? std::optional<Rational>(ex->h1) : std::nullopt, cf.h1);
        j["H2"] = detail::exact_value(ex ? std::optional<Rational>(ex->h2) : std::nullopt, cf.h2);
        j["M"] = num(peakon_max(a));
        j["m"] = num(peakon_min(a));
        j["n"] = args.n;
        const auto report = dir / "peakon_report.json";
        write_json_file(report, j);
        m.outputs.push_back(report.string());
        out << j.dump(2) << '\n';
        std::size_t positive = 0;
        for (double r : roots) positive += r > 0.0;
        if (positive > 1) err << "note: " << positive << " positive amplitudes; the smallest was selected\n";
        m.summary = "peakon a=" + fmt17(a) + " regime " + to_string(regime);
        m.exit_code = kOk;
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        m.summary = e.what();
        m.extra["offending_key"] = e.key();
        m.exit_code = kConfigError;
    }
    return detail::finish(dir, "peakon", m);
}

// ------------------------------------------------------------------ simulate / stability / sweep

namespace detail {

inline void write_snapshots(std::ostream& os, const Trajectory& traj) {
    os << "t,x,value\n";
    char buf[96];
    for (std::size_t i = 0; i < traj.states.size(); ++i) {
        const auto& u = traj.states[i];
        for (std::size_t j = 0; j < u.size(); ++j) {
            std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", traj.times[i], u.node(j), u[j]);
            os << buf;
        }
    }
}

inline json blowup_json(const std::optional<BlowUpRecord>& b) {
    if (!b) return nullptr;
    return {{"time", num(b->time)}, {"max_abs", num(b->max_abs)}};
}

struct LoadedConfig {
    KeyValueConfig kv;
    ExperimentConfig cfg;
};

inline LoadedConfig load_experiment(const std::string& path, const CommonOptions& opts, RunManifest& m) {
    auto kv = KeyValueConfig::load(path);
    m.config = kv.values();
    auto cfg = ExperimentConfig::from(kv, opts.seed);
    m.config["seed"] = std::to_string(cfg.seed);
    return {std::move(kv), std::move(cfg)};
}

inline json config_error(RunManifest& m, const ConfigError& e, std::ostream& err) {
    err << "error: " << e.what() << '\n';
    m.summary = e.what();
    m.extra["offending_key"] = e.key();
    m.exit_code = kConfigError;
    return nullptr;
}

} // namespace detail

inline int cmd_simulate(const CommonOptions& opts, const std::string& config_path, std::ostream& out,
                        std::ostream& err) {
    const auto dir = detail::prepare_out_dir(opts);
    RunManifest m;
    m.command = "simulate";
    m.config["config"] = config_path;
    std::string stem = "simulate";
    try {
        const auto [kv, cfg] = detail::load_experiment(config_path, opts, m);
        stem = cfg.out_prefix;
        const auto profile = build_peakon(cfg.sim.params, cfg.amplitude, cfg.sim.n);
        const auto u0 = mollified_peakon(cfg.amplitude, cfg.sim.n, cfg.mollify_modes) +
                        perturbation_field(cfg.sim.n, cfg.perturbation);
        const auto traj = evolve(u0, cfg.sim);
        const auto drift = relative_drift(traj);

        const auto inv_path = dir / (stem + "_invariants.csv");
        {
            std::ofstream os(inv_path, std::ios::binary);
            write_invariant_header(os);
            for (std::size_t i = 0; i < traj.times.size(); ++i) write_invariant_row(os, traj.times[i], traj.invariants[i]);
        }
        const auto snap_path = dir / (stem + "_snapshots.csv");
        {
            std::ofstream os(snap_path, std::ios::binary);
            detail::write_snapshots(os, traj);
        }
        json j;
        j["amplitude"] = num(cfg.amplitude);
        j["speed"] = num(profile.speed);
        j["regime"] = to_string(classify_regime(cfg.sim.params, cfg.amplitude));
        j["mollify_modes"] = cfg.mollify_modes;
        j["epsilon"] = num(1.0 / static_cast<double>(cfg.mollify_modes));
        j["dt"] = num(traj.dt);
        j["steps"] = traj.steps;
        j["final_time"] = num(traj.times.back());
        j["relative_drift"] = detail::invariants_json(drift);
        j["blowup"] = detail::blowup_json(traj.blowup);
        j["wall_clock_exceeded"] = traj.wall_clock_exceeded;
        const auto rep_path = dir / (stem + "_report.json");
        write_json_file(rep_path, j);
        m.outputs = {inv_path.string(), snap_path.string(), rep_path.string()};
        if (opts.json) out << j.dump(2) << '\n';
        else if (traj.complete())
            out << "simulated to t=" << fmt17(traj.times.back()) << " in " << traj.steps << " steps; drift h1 "
                << fmt17(drift.h1) << ", h2 " << fmt17(drift.h2) << '\n';
        else
            out << "run truncated; last recorded state at t=" << fmt17(traj.times.back()) << '\n';
        m.extra["blowup"] = detail::blowup_json(traj.blowup);
        m.extra["truncation_time"] = traj.complete() ? json(nullptr) : num(traj.times.back());
        m.exit_code = traj.blowup ? kBlowUp : kOk;
        m.summary = traj.blowup ? "blow-up at t=" + fmt17(traj.blowup->time) : "completed";
        if (traj.blowup) err << "blow-up detected at t=" << fmt17(traj.blowup->time) << '\n';
    } catch (const ConfigError& e) {
        detail::config_error(m, e, err);
    }
    return detail::finish(dir, stem, m);
}

/// Regime warning text, empty when the parameters sit inside a stability regime.
inline std::string regime_warning(Regime r) {
    return r == Regime::none ? "parameters satisfy none of the stability regimes; running for exploration" : "";
}

inline json verdict_json(const StabilityReport& rep) {
    json j;
    j["regime"] = to_string(rep.regime);
    j["warning"] = regime_warning(rep.regime);
    j["mollification_distance"] = num(rep.mollification_distance);
    j["initial_distance"] = num(rep.initial_distance);
    j["sup_distance"] = num(rep.sup_distance);
    j["verdict_ratio"] = num(rep.verdict_ratio);
    j["box_deviation"] = num(rep.box_deviation);
    j["ratio_bounded_by_10"] = rep.verdict_ratio <= 10.0;
    j["extrema_in_box_0.1"] = rep.box_deviation <= 0.1;
    j["relative_drift"] = detail::invariants_json(rep.drift);
    j["blowup"] = detail::blowup_json(rep.blowup);
    j["wall_clock_exceeded"] = rep.wall_clock_exceeded;
    return j;
}

inline int cmd_stability(const CommonOptions& opts, const std::string& config_path, std::ostream& out,
                         std::ostream& err) {
    const auto dir = detail::prepare_out_dir(opts);
    RunManifest m;
    m.command = "stability";
    m.config["config"] = config_path;
    std::string stem = "stability";
    try {
        const auto [kv, cfg] = detail::load_experiment(config_path, opts, m);
        stem = cfg.out_prefix;
        const auto profile = build_peakon(cfg.sim.params, cfg.amplitude, cfg.sim.n);
        const auto rep = stability_experiment(profile, cfg.mollify_modes, cfg.perturbation, cfg.sim);
        if (rep.regime == Regime::none) err << "warning: " << regime_warning(rep.regime) << '\n';
        const auto csv = dir / (stem + "_stability.csv");
        {
            std::ofstream os(csv, std::ios::binary);
            write_stability_csv(os, rep);
        }
        const auto verdict = verdict_json(rep);
        const auto vpath = dir / (stem + "_verdict.json");
        write_json_file(vpath, verdict);
        m.outputs = {csv.string(), vpath.string()};
        if (opts.json) out << verdict.dump(2) << '\n';
        else
            out << "regime " << to_string(rep.regime) << ": sup distance / initial = " << fmt17(rep.verdict_ratio)
                << ", extrema box deviation " << fmt17(rep.box_deviation) << '\n';
        m.extra["blowup"] = detail::blowup_json(rep.blowup);
        m.extra["truncation_time"] = rep.blowup || rep.wall_clock_exceeded ? num(rep.times.back()) : json(nullptr);
        m.exit_code = rep.blowup ? kBlowUp : kOk;
        m.summary = rep.blowup ? "blow-up at t=" + fmt17(rep.blowup->time) : "completed";
    } catch (const ConfigError& e) {
        detail::config_error(m, e, err);
    }
    return detail::finish(dir, stem, m);
}

/**
 * Stability experiments over every delta, for the configured parameters and
 * for regime_draws random parameter sets per regime (i)-(v).
 */
inline int cmd_sweep(const CommonOptions& opts, const std::string& config_path, std::ostream& out,
                     std::ostream& err) {
    const auto dir = detail::prepare_out_dir(opts);
    RunManifest m;
    m.command = "sweep";
    m.config["config"] = config_path;
    std::string stem = "sweep";
    try {
        const auto [kv, cfg] = detail::load_experiment(config_path, opts, m);
        stem = cfg.out_prefix;
        struct Case {
            std::string regime;
            std::size_t draw;
            ModelParams params;
        };
        std::vector<Case> cases{{to_string(classify_regime(cfg.sim.params, cfg.amplitude)), 0, cfg.sim.params}};
        Rng rng(cfg.seed);
        for (Regime r : {Regime::i, Regime::ii, Regime::iii, Regime::iv, Regime::v})
            for (std::size_t d = 1; d <= cfg.regime_draws; ++d) cases.push_back({to_string(r), d, sample_params(r, cfg.amplitude, rng)});
        PerturbationSpec pert = cfg.perturbation;
        if (pert.kind == PerturbationKind::none) pert.kind = PerturbationKind::sin;

        const auto csv = dir / (stem + "_sweep.csv");
        std::ofstream os(csv, std::ios::binary);
        os << "regime,draw,a1,a2,a3,amplitude,delta,initial_distance,sup_distance,verdict_ratio,box_deviation,"
              "blowup_time\n";
        bool any_blowup = false;
        for (const auto& c : cases) {
            SimConfig sim = cfg.sim;
            sim.params = c.params;
            const auto profile = build_peakon(c.params, cfg.amplitude, sim.n);
            for (double delta : cfg.deltas) {
                pert.size = delta;
                const auto rep = stability_experiment(profile, cfg.mollify_modes, pert, sim);
                any_blowup = any_blowup || rep.blowup.has_value();
                os << c.regime << ',' << c.draw << ',' << fmt17(c.params.a1) << ',' << fmt17(c.params.a2) << ','
                   << fmt17(c.params.a3) << ',' << fmt17(cfg.amplitude) << ',' << fmt17(delta) << ','
                   << fmt17(rep.initial_distance) << ',' << fmt17(rep.sup_distance) << ','
                   << fmt17(rep.verdict_ratio) << ',' << fmt17(rep.box_deviation) << ','
                   << (rep.blowup ? fmt17(rep.blowup->time) : std::string("")) << '\n';
            }
        }
        os.close();
        m.outputs = {csv.string()};
        out << "sweep: " << cases.size() << " parameter sets x " << cfg.deltas.size() << " perturbation sizes -> "
            << csv.string() << '\n';
        m.exit_code = any_blowup ? kBlowUp : kOk;
        m.summary = any_blowup ? "at least one run blew up" : "completed";
        if (any_blowup) err << "warning: at least one run blew up (see blowup_time column)\n";
    } catch (const ConfigError& e) {
        detail::config_error(m, e, err);
    }
    return detail::finish(dir, stem, m);
}

} // namespace hmch::cli
