#include <CLI11.hpp>
#include <iostream>

#include "tngpricer/commands.hpp"
#include "tngpricer/errors.hpp"

int main(int argc, char** argv) {
    using namespace tngpricer;

    CLI::App app{"Structural-credit pricer for tax normalization guarantees and CDO tranches over them"};
    std::string command;
    std::string scenario_path;
    std::string bridge;
    std::string matrix;
    std::string out = ".";
    RunFlags flags;

    app.add_option("command", command, "price-bond | price-perpetual | check-pde | simulate | price-cdo | calibrate")
        ->required()
        ->check(CLI::IsMember(command_names()));
    app.add_option("--scenario", scenario_path, "Scenario JSON file");
    app.add_option("--seed", flags.seed, "Seed for randomized commands (required by simulate and price-cdo)");
    app.add_option("--out", out, "Output directory")->capture_default_str();
    app.add_option("--paths", flags.paths, "Monte Carlo paths")->check(CLI::PositiveNumber);
    app.add_option("--steps", flags.steps, "Time steps per path")->check(CLI::PositiveNumber);
    app.add_option("--bridge", bridge, "Brownian-bridge barrier correction")->check(CLI::IsMember({"on", "off"}));
    app.add_option("--recovery", flags.recovery, "Recovery fraction of face at default")->check(CLI::Range(0.0, 1.0));
    app.add_option("--matrix", matrix, "Correlation matrix CSV for calibrate");
    app.add_option("--threads", flags.threads, "Worker threads (0 = all cores); never changes results");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitValidation;
    }

    flags.out_dir = out;
    if (!bridge.empty()) flags.bridge = bridge == "on";
    if (!matrix.empty()) flags.matrix = matrix;

    try {
        std::optional<Scenario> scenario;
        if (!scenario_path.empty()) scenario = load_scenario(scenario_path);
        run_command(command, scenario, flags);
    } catch (const Error& e) {
        std::cerr << "tngpricer: " << e.what() << '\n';
        return exit_status(e);
    } catch (const std::exception& e) {
        std::cerr << "tngpricer: internal error: " << e.what() << '\n';
        return 1;
    }
    return kExitOk;
}
