#pragma once

// End-to-end experiment runs that write result files to a directory.

#include <cstddef>
#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "allocbench/config.hpp"
#include "allocbench/eval.hpp"

namespace allocbench {

inline constexpr const char* kVersion = "allocbench 1.0.0";

struct RunOptions {
    bool plots = true;         ///< f1_TOPK.svg and f1_CE.svg
    bool save_models = false;  ///< models/<setting>_<sim>.model
    std::ostream* log = nullptr;
};

struct RunSummary {
    std::vector<SweepRecord> records;
    std::vector<AggregateRow> aggregate;
    double wall_seconds = 0.0;
    std::size_t node_limit_hits = 0;
    std::filesystem::path output_dir;
};

/// Runs every setting x scenario and writes into config.output_dir:
///   results.csv, aggregate.csv, manifest.cfg (a loadable config plus comment
///   lines with version and wall time), shift_diagnostics.csv, and optionally
///   plots and models. Every file is written atomically.
RunSummary run_experiment(const ExperimentConfig& config, const RunOptions& options = {});

}  // namespace allocbench
