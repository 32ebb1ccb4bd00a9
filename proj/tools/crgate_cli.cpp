#include "crgate/cli.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    using namespace crgate;

    CLI::App app{"Simulate and analyse the seven-step n-qubit controlled-rotation gate"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = ".";
    std::string tier_text;
    std::string theta_text;
    int n_override = 0;
    app.add_option("--config", config_path, "Config file (dotted key = value)")->check(CLI::ExistingFile);
    app.add_option("--out", out_dir, "Output directory");
    app.add_option("--tier", tier_text, "Model tier: T0, T1 or T2");
    app.add_option("--n", n_override, "Number of qubits");
    app.add_option("--theta", theta_text, "Rotation angle in radians, or hadamard-pi4");

    auto* validate = app.add_subcommand("validate", "Run the invariant checks for a configuration")->fallthrough();
    auto* run = app.add_subcommand("run", "Extract the realised gate; writes summary.txt and gate_report.csv")->fallthrough();
    auto* sweep = app.add_subcommand("sweep", "Evaluate a parameter grid; writes sweep.csv")->fallthrough();
    auto* timing = app.add_subcommand("timing", "Print the gate-time breakdown and coherence budget")->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitConfig;
    }

    RunConfig cfg;
    try {
        if (!config_path.empty()) cfg = load_config(config_path);
        if (!tier_text.empty()) cfg.tier = parse_tier_or_throw(tier_text);
        if (n_override != 0) cfg.n = n_override;
        if (!theta_text.empty()) std::tie(cfg.theta, cfg.theta_preset) = parse_theta(theta_text);
        cfg.validate();
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    }

    try {
        if (validate->parsed()) return cmd_validate(cfg, std::cout);
        if (run->parsed()) return cmd_run(cfg, out_dir, std::cout);
        if (sweep->parsed()) return cmd_sweep(cfg, out_dir, std::cout);
        if (timing->parsed()) return cmd_timing(cfg, std::cout);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    }
    return kExitOk;
}
