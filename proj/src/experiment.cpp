#include "allocbench/experiment.hpp"

#include <chrono>
#include <mutex>
#include <sstream>

#include "allocbench/csv_io.hpp"
#include "allocbench/plot.hpp"
#include "allocbench/shift.hpp"

namespace allocbench {

RunSummary run_experiment(const ExperimentConfig& config, const RunOptions& options) {
    const auto start = std::chrono::steady_clock::now();
    RunSummary summary;
    summary.output_dir = config.output_dir;
    std::filesystem::create_directories(summary.output_dir);

    if (options.log) *options.log << "preparing cohorts and domain classifier\n";
    const Experiment experiment(config);

    RunHooks hooks;
    hooks.log = options.log;
    std::mutex model_mutex;
    if (options.save_models && !config.oracle_model) {
        std::filesystem::create_directories(summary.output_dir / "models");
        hooks.on_cell = [&](const CellResult& cell) {
            std::ostringstream text;
            save_model(text, *cell.model);
            const auto name = to_string(cell.setting) + "_" + std::to_string(cell.sim) + ".model";
            std::lock_guard lock(model_mutex);
            write_file_atomic(summary.output_dir / "models" / name, text.str());
        };
    }
    summary.records = run_all(experiment, config.threads, hooks);
    summary.aggregate = aggregate(summary.records);
    summary.node_limit_hits = experiment.node_limit_hits();

    std::ostringstream results, agg, diagnostics;
    write_results_csv(results, summary.records);
    write_aggregate_csv(agg, summary.aggregate);
    write_shift_diagnostics_csv(diagnostics, experiment.domain_probability(), experiment.weights());
    write_file_atomic(summary.output_dir / "results.csv", results.str());
    write_file_atomic(summary.output_dir / "aggregate.csv", agg.str());
    write_file_atomic(summary.output_dir / "shift_diagnostics.csv", diagnostics.str());
    if (options.plots) {
        write_file_atomic(summary.output_dir / "f1_TOPK.svg", render_f1_plot(summary.aggregate, Scenario::topk));
        write_file_atomic(summary.output_dir / "f1_CE.svg", render_f1_plot(summary.aggregate, Scenario::ce));
    }

    summary.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::ostringstream manifest;
    manifest << "# " << kVersion << '\n'
             << "# wall_time_seconds = " << format_short(summary.wall_seconds) << '\n'
             << "# knapsack_node_limit_hits = " << summary.node_limit_hits << '\n'
             << config.to_text();
    write_file_atomic(summary.output_dir / "manifest.cfg", manifest.str());
    return summary;
}

}  // namespace allocbench
