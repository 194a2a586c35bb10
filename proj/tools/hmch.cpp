#include <hmch/cli/commands.hpp>

#include <CLI11.hpp>

#include <iostream>
#include <string>

int main(int argc, char** argv) {
    using namespace hmch::cli;
    CLI::App app{"Peakon experiments for a mu-Camassa-Holm equation with cubic flux"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_version_flag("--version", kVersion);

    CommonOptions common;
    std::uint64_t seed = 0;
    app.add_option("--out-dir", common.out_dir, "Directory for all outputs")->capture_default_str();
    auto* seed_opt = app.add_option("--seed", seed, "Seed for every random draw (overrides the config)");
    app.add_flag("--json", common.json, "Print machine-readable JSON instead of text");

    auto* verify = app.add_subcommand("verify", "Run the exact and numeric identity suite");

    PeakonArgs pk;
    auto* peakon = app.add_subcommand("peakon", "Resolve a peakon and its invariants");
    peakon->add_option("--a1", pk.a1, "Coefficient a1 (rational allowed)")->capture_default_str();
    peakon->add_option("--a2", pk.a2, "Coefficient a2")->capture_default_str();
    peakon->add_option("--a3", pk.a3, "Coefficient a3")->capture_default_str();
    peakon->add_option("--speed", pk.speed, "Wave speed c");
    peakon->add_option("--amp", pk.amp, "Amplitude a");
    peakon->add_option("--n", pk.n, "Grid size for the sampled profile")->capture_default_str();

    std::string config;
    auto add_config_command = [&](const char* name, const char* help) {
        auto* sub = app.add_subcommand(name, help);
        sub->add_option("config", config, "Key-value configuration file")->required();
        return sub;
    };
    auto* simulate = add_config_command("simulate", "Evolve a mollified peakon and monitor invariants");
    auto* stability = add_config_command("stability", "Orbital-stability experiment for one perturbation");
    auto* sweep = add_config_command("sweep", "Stability experiments over perturbation sizes and regime draws");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kConfigError;
    }
    if (*seed_opt) common.seed = seed;

    try {
        if (*verify) return cmd_verify(common, std::cout);
        if (*peakon) return cmd_peakon(common, pk, std::cout, std::cerr);
        if (*simulate) return cmd_simulate(common, config, std::cout, std::cerr);
        if (*stability) return cmd_stability(common, config, std::cout, std::cerr);
        if (*sweep) return cmd_sweep(common, config, std::cout, std::cerr);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kFailed;
    }
    return kFailed;
}
