#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "infobatch/commands.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Unbiased dynamic data pruning: training runs, property checks and timing"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_path;
    std::uint64_t seed = 0;
    auto* run = app.add_subcommand("run", "Train with a JSON config and write JSON Lines metrics");
    run->add_option("--config", config_path, "Path to the run config")->required()->check(CLI::ExistingFile);
    run->add_option("--out", out_path, "Metrics output path (overrides \"output\" in the config)");
    auto* run_seed = run->add_option("--seed", seed, "Override the config seed");

    std::string suite;
    std::uint64_t verify_seed = 0;
    auto* verify = app.add_subcommand("verify", "Run a statistical property suite");
    verify->add_option("--suite", suite, "unbiasedness | variance | annealing | lr_bound | mixup")->required();
    verify->add_option("--seed", verify_seed, "Seed for the Monte Carlo draws");

    std::size_t n = 1'000'000;
    std::size_t trials = 20;
    auto* bench = app.add_subcommand("bench", "Time mean threshold against a full sort");
    bench->add_option("--n", n, "Number of scores");
    bench->add_option("--trials", trials, "Timed repetitions");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? infobatch::cli::kSuccess : infobatch::cli::kUsageError;
    }

    try {
        if (*run) {
            std::optional<std::filesystem::path> out;
            if (!out_path.empty()) out = out_path;
            std::optional<std::uint64_t> override_seed;
            if (*run_seed) override_seed = seed;
            return infobatch::cli::run(config_path, out, override_seed, std::cerr);
        }
        if (*verify) return infobatch::cli::verify(suite, verify_seed, std::cout, std::cerr);
        return infobatch::cli::bench(n, trials, std::cout, std::cerr);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return infobatch::cli::kUsageError;
    }
}
