// allocbench command-line interface: simulate, run, plot, validate.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "allocbench/config.hpp"
#include "allocbench/csv_io.hpp"
#include "allocbench/errors.hpp"
#include "allocbench/eval.hpp"
#include "allocbench/experiment.hpp"
#include "allocbench/plot.hpp"

namespace fs = std::filesystem;
using namespace allocbench;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct CommonFlags {
    std::string config_path;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
    bool oracle_model = false;
};

void add_common(CLI::App* cmd, CommonFlags& flags, bool with_oracle) {
    cmd->add_option("--config", flags.config_path, "experiment config file (key = value lines)");
    cmd->add_option("--out", flags.out, "output directory");
    cmd->add_option("--seed", flags.seed, "override master_seed");
    cmd->add_option("--threads", flags.threads, "worker threads")->check(CLI::PositiveNumber);
    if (with_oracle) cmd->add_flag("--oracle-model", flags.oracle_model, "use the true effects instead of a fitted model");
}

ExperimentConfig load_config(const CommonFlags& flags) {
    ExperimentConfig config = flags.config_path.empty() ? ExperimentConfig{} : validate_config(flags.config_path);
    if (flags.seed) config.master_seed = *flags.seed;
    if (flags.threads) config.threads = *flags.threads;
    if (flags.oracle_model) config.oracle_model = true;
    if (!flags.out.empty()) config.output_dir = flags.out;
    config.validate();
    return config;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Treatment allocation benchmark under data limitations and covariate shift"};
    app.require_subcommand(1);

    CommonFlags flags;

    auto* simulate = app.add_subcommand("simulate", "write one simulated population as CSV");
    add_common(simulate, flags, false);
    std::string cohort = "train";
    std::size_t sim = 0;
    simulate->add_option("--cohort", cohort, "train or test")->check(CLI::IsMember({"train", "test"}));
    simulate->add_option("--sim", sim, "outcome simulation index");

    auto* run = app.add_subcommand("run", "run the full experiment");
    add_common(run, flags, true);
    bool save_models = false, no_plots = false, quiet = false;
    run->add_flag("--save-models", save_models, "write fitted models to <out>/models");
    run->add_flag("--no-plots", no_plots, "skip the SVG charts");
    run->add_flag("--quiet", quiet, "no progress output");

    auto* plot = app.add_subcommand("plot", "render an SVG chart from an aggregate CSV");
    std::string aggregate_path, scenario_name = "TOPK", svg_out;
    plot->add_option("aggregate", aggregate_path, "aggregate CSV")->required();
    plot->add_option("--scenario", scenario_name, "TOPK or CE")->check(CLI::IsMember({"TOPK", "CE"}));
    plot->add_option("--out", svg_out, "output directory (default: next to the CSV)");

    auto* validate = app.add_subcommand("validate", "check a config file and print it with defaults filled in");
    validate->add_option("--config", flags.config_path, "experiment config file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (*validate) {
            std::cout << load_config(flags).to_text();
            return 0;
        }
        if (*plot) {
            const auto scenario = parse_scenario(scenario_name);
            const fs::path dir = svg_out.empty() ? fs::path(aggregate_path).parent_path() : fs::path(svg_out);
            if (!dir.empty()) fs::create_directories(dir);
            const auto target = dir / ("f1_" + scenario_name + ".svg");
            emit_plot(aggregate_path, scenario, target);
            std::cout << target.string() << '\n';
            return 0;
        }
        const auto config = load_config(flags);
        if (*simulate) {
            if (sim >= config.n_sims) throw ConfigError("sim", "must be below n_sims");
            const Experiment experiment(config, false);
            const auto sample = cohort == "train" ? experiment.training_pool_sample(sim) : experiment.test_sample(sim);
            std::ostringstream csv;
            write_population_csv(csv, sample);
            fs::create_directories(config.output_dir);
            const auto target = fs::path(config.output_dir) / ("population_" + cohort + "_sim" + std::to_string(sim) + ".csv");
            write_file_atomic(target, csv.str());
            std::cout << target.string() << '\n';
            return 0;
        }
        RunOptions options;
        options.plots = !no_plots;
        options.save_models = save_models;
        options.log = quiet ? nullptr : &std::cerr;
        const auto summary = run_experiment(config, options);
        std::cout << "wrote " << summary.records.size() << " records to " << summary.output_dir.string() << " in "
                  << format_short(summary.wall_seconds) << " s\n";
        if (summary.node_limit_hits > 0)
            std::cerr << "warning: " << summary.node_limit_hits << " knapsack solves hit the node limit\n";
        return 0;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
}
