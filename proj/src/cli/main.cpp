// hnl: train | evaluate | schedule | toy. Exit codes: 0 ok, 1 bad config or
// arguments, 2 runtime or solver failure.

#include "hnl/cli/commands.hpp"
#include "hnl/core/error.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

constexpr int kConfigError = 1;
constexpr int kRuntimeError = 2;

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multi-resolution forecasting with banded Laplace decoders, and dispatch costing"};
    app.require_subcommand(1);
    std::string config_path, out_dir, seeds;
    auto add = [&](const char* name, const char* help) {
        auto* sub = app.add_subcommand(name, help);
        sub->add_option("--config", config_path, "run configuration (JSON)")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", out_dir, "output directory (overrides the config's 'output')");
        sub->add_option("--seeds", seeds, "comma-separated seed list (overrides the config's 'seeds')");
        return sub;
    };
    auto* train = add("train", "train every configured model for every seed");
    auto* evaluate = add("evaluate", "forecast the test split and compute metrics");
    auto* schedule = add("schedule", "cost the forecasts through the dispatch pipelines");
    auto* toy = add("toy", "frequency-filter toy and single-large-decoder diagnostic");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kConfigError;
    }

    try {
        auto config = hnl::cli::load_run_config(config_path);
        if (!seeds.empty()) config.seeds = hnl::cli::parse_seed_list(seeds);
        if (!out_dir.empty()) config.output = out_dir;
        if (config.output.empty()) throw hnl::ConfigError("no output directory: pass --out or set 'output'");
        (void)hnl::cli::thread_budget();  // validate HNL_THREADS before any compute
        const auto bytes = hnl::cli::read_file(config_path);
        hnl::cli::OutputDir out(config.output);
        if (*train) hnl::cli::cmd_train(config, bytes, out);
        if (*evaluate) hnl::cli::cmd_evaluate(config, bytes, out);
        if (*schedule) hnl::cli::cmd_schedule(config, bytes, out);
        if (*toy) hnl::cli::cmd_toy(config, bytes, out);
    } catch (const hnl::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kRuntimeError;
    }
    return 0;
}
