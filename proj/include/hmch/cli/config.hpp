#pragma once

#include <hmch/exact_poly.hpp>
#include <hmch/stability.hpp>

#include <cerrno>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace hmch::cli {

/// Schema violation; maps to exit code 2 and names the offending key.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string key, const std::string& what)
        : std::runtime_error(key.empty() ? what : "config key '" + key + "': " + what), key_(std::move(key)) {}
    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

inline const std::set<std::string>& known_keys() {
    static const std::set<std::string> keys{
        "n",         "t_end",      "dt",          "cfl",        "a1",
        "a2",        "a3",         "amp",         "speed",      "mollify_modes",
        "perturbation_kind",       "perturbation_size",         "record_every",
        "out_prefix", "seed",      "deltas",      "regime_draws", "wall_clock_limit",
        "dealias"};
    return keys;
}

/**
 * Flat `key = value` file. `#` starts a comment, blank lines are ignored, keys
 * are unique and must belong to known_keys().
 */
class KeyValueConfig {
public:
    static KeyValueConfig parse(std::istream& in) {
        KeyValueConfig cfg;
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
            const auto text = trim(line);
            if (text.empty()) continue;
            const auto eq = text.find('=');
            if (eq == std::string::npos)
                throw ConfigError("", "line " + std::to_string(lineno) + ": expected key = value");
            const auto key = trim(text.substr(0, eq));
            const auto value = trim(text.substr(eq + 1));
            if (key.empty()) throw ConfigError("", "line " + std::to_string(lineno) + ": empty key");
            if (!known_keys().count(key)) throw ConfigError(key, "unknown key");
            if (cfg.values_.count(key)) throw ConfigError(key, "given twice");
            cfg.values_[key] = value;
        }
        return cfg;
    }

    static KeyValueConfig load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw ConfigError("", "cannot read config file " + path);
        return parse(in);
    }

    bool has(const std::string& key) const { return values_.count(key) != 0; }
    const std::map<std::string, std::string>& values() const noexcept { return values_; }

    std::string require_string(const std::string& key) const {
        auto it = values_.find(key);
        if (it == values_.end()) throw ConfigError(key, "missing required key");
        return it->second;
    }

    double require_double(const std::string& key) const { return to_double_value(key, require_string(key)); }

    double get_double(const std::string& key, double fallback) const {
        return has(key) ? require_double(key) : fallback;
    }

    std::optional<double> optional_double(const std::string& key) const {
        if (!has(key)) return std::nullopt;
        return require_double(key);
    }

    std::uint64_t get_uint(const std::string& key, std::uint64_t fallback) const {
        if (!has(key)) return fallback;
        const auto& s = values_.at(key);
        char* end = nullptr;
        errno = 0;
        const unsigned long long v = std::strtoull(s.c_str(), &end, 10);
        if (s.empty() || *end != '\0' || errno != 0 || s[0] == '-')
            throw ConfigError(key, "expected a non-negative integer, got '" + s + "'");
        return v;
    }

    std::uint64_t require_uint(const std::string& key) const {
        if (!has(key)) throw ConfigError(key, "missing required key");
        return get_uint(key, 0);
    }

    std::vector<double> get_double_list(const std::string& key, std::vector<double> fallback) const {
        if (!has(key)) return fallback;
        std::vector<double> out;
        std::stringstream ss(values_.at(key));
        std::string item;
        while (std::getline(ss, item, ',')) out.push_back(to_double_value(key, trim(item)));
        if (out.empty()) throw ConfigError(key, "empty list");
        return out;
    }

private:
    static std::string trim(const std::string& s) {
        const auto b = s.find_first_not_of(" \t\r");
        if (b == std::string::npos) return {};
        const auto e = s.find_last_not_of(" \t\r");
        return s.substr(b, e - b + 1);
    }

    // Accepts decimals, exponents and p/q rationals.
    static double to_double_value(const std::string& key, const std::string& s) {
        if (s.find('/') != std::string::npos) {
            try {
                return hmch::to_double(parse_rational(s));
            } catch (const std::exception&) {
                throw ConfigError(key, "expected a number, got '" + s + "'");
            }
        }
        char* end = nullptr;
        errno = 0;
        const double v = std::strtod(s.c_str(), &end);
        if (s.empty() || *end != '\0' || errno != 0 || !std::isfinite(v))
            throw ConfigError(key, "expected a number, got '" + s + "'");
        return v;
    }

    std::map<std::string, std::string> values_;
};

/// Everything simulate, stability and sweep need, validated.
struct ExperimentConfig {
    SimConfig sim;
    double amplitude = 0.0;
    std::size_t mollify_modes = 0;
    PerturbationSpec perturbation;
    std::string out_prefix = "run";
    std::uint64_t seed = 0;
    std::vector<double> deltas;
    std::size_t regime_draws = 0;

    static ExperimentConfig from(const KeyValueConfig& kv, std::optional<std::uint64_t> seed_override = {}) {
        ExperimentConfig c;
        c.sim.n = static_cast<std::size_t>(kv.require_uint("n"));
        if (c.sim.n < kMinGridSize || !fft::is_power_of_two(c.sim.n))
            throw ConfigError("n", "must be a power of two >= 16");
        c.sim.t_end = kv.require_double("t_end");
        if (!(c.sim.t_end > 0.0)) throw ConfigError("t_end", "must be positive");
        if (kv.has("dt") == kv.has("cfl")) throw ConfigError(kv.has("dt") ? "cfl" : "dt", "give exactly one of dt and cfl");
        if (kv.has("dt")) {
            c.sim.dt = kv.require_double("dt");
            if (!(*c.sim.dt > 0.0)) throw ConfigError("dt", "must be positive");
        } else {
            c.sim.cfl = kv.require_double("cfl");
            if (!(*c.sim.cfl > 0.0 && *c.sim.cfl <= 1.0)) throw ConfigError("cfl", "must lie in (0, 1]");
        }
        c.sim.params = {kv.get_double("a1", 0.0), kv.get_double("a2", 0.0), kv.get_double("a3", 0.0)};
        c.sim.record_every = static_cast<std::size_t>(kv.get_uint("record_every", 1));
        if (c.sim.record_every == 0) throw ConfigError("record_every", "must be at least 1");
        c.sim.wall_clock_limit = kv.get_double("wall_clock_limit", 0.0);
        if (c.sim.wall_clock_limit < 0.0) throw ConfigError("wall_clock_limit", "must be non-negative");
        if (kv.has("dealias")) {
            const auto v = kv.require_string("dealias");
            if (v != "true" && v != "false") throw ConfigError("dealias", "expected true or false");
            c.sim.dealias = v == "true";
        }

        if (kv.has("amp") == kv.has("speed"))
            throw ConfigError(kv.has("amp") ? "speed" : "amp", "give exactly one of amp and speed");
        if (kv.has("amp")) {
            c.amplitude = kv.require_double("amp");
            if (!(c.amplitude > 0.0)) throw ConfigError("amp", "must be positive");
        } else {
            try {
                c.amplitude = smallest_positive_amplitude(c.sim.params, kv.require_double("speed"));
            } catch (const DomainError& e) {
                throw ConfigError("speed", e.what());
            }
        }

        c.mollify_modes = static_cast<std::size_t>(kv.get_uint("mollify_modes", std::min<std::uint64_t>(64, c.sim.n / 2)));
        if (c.mollify_modes == 0 || c.mollify_modes > c.sim.n / 2)
            throw ConfigError("mollify_modes", "must lie in [1, n/2]");

        const auto kind = parse_perturbation_kind(kv.has("perturbation_kind") ? kv.require_string("perturbation_kind") : "none");
        if (!kind) throw ConfigError("perturbation_kind", "expected none, sin, cos or random");
        c.perturbation.kind = *kind;
        c.perturbation.size = kv.get_double("perturbation_size", 0.0);
        if (c.perturbation.size < 0.0) throw ConfigError("perturbation_size", "must be non-negative");

        c.out_prefix = kv.has("out_prefix") ? kv.require_string("out_prefix") : "run";
        if (c.out_prefix.empty() || c.out_prefix.find('/') != std::string::npos)
            throw ConfigError("out_prefix", "must be a plain file name prefix");
        c.seed = seed_override ? *seed_override : kv.get_uint("seed", 0);
        c.perturbation.seed = c.seed;
        c.deltas = kv.get_double_list("deltas", {1e-1, 1e-2, 1e-3, 1e-4});
        for (double d : c.deltas)
            if (!(d >= 0.0)) throw ConfigError("deltas", "entries must be non-negative");
        c.regime_draws = static_cast<std::size_t>(kv.get_uint("regime_draws", 0));
        return c;
    }
};

} // namespace hmch::cli
