#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "allocbench/boosting.hpp"

namespace allocbench {

/// Everything that determines an experiment. Defaults reproduce the reference
/// protocol: 5000 training units, a 500-unit limited setting, shift
/// intensity 6 and 10 outcome simulations.
struct ExperimentConfig {
    std::uint64_t master_seed = 20240717;  ///< outcome simulations, shift induction, learners
    std::uint64_t dgp_seed = 1;             ///< covariate cohorts and outcome-model coefficients
    std::size_t n_train = 5000;
    std::size_t n_limited = 500;
    std::size_t n_test = 5000;
    std::size_t n_sims = 10;
    int shift_q = 6;
    std::size_t shift_m = 0;  ///< 0 means "same as n_train"
    bool signed_weights = false;
    std::vector<double> budget_fractions;  ///< 0.05, 0.10, ..., 0.95
    std::vector<double> drift;             ///< test-cohort drift, one entry per covariate
    double noise_sd = 0.1;
    int cv_folds = 5;
    std::vector<double> gb_learning_rates = {0.1, 0.3};
    std::vector<int> gb_max_depths = {3, 5, 8};
    std::vector<int> gb_n_estimators = {30, 100};
    std::vector<double> logistic_c = {0.1, 1.0, 10.0, 100.0};
    double propensity_clip = 0.01;
    int rf_trees = 100;
    int rf_max_depth = 8;
    double domain_p_min = 1e-3;
    std::uint64_t knapsack_node_limit = 10'000'000;
    bool oracle_model = false;
    std::string output_dir = "results";
    int threads = 1;

    ExperimentConfig();

    std::size_t resample_size() const noexcept { return shift_m == 0 ? n_train : shift_m; }
    std::vector<BoostingParams> boosting_grid() const;

    /// Range checks; throws ConfigError naming the offending field.
    void validate() const;

    /// Canonical `key = value` rendering that parses back to an identical
    /// config.
    std::string to_text() const;
};

/// Parses `key = value` lines; '#' starts a comment, blank lines are ignored,
/// lists are comma separated. Absent keys keep their defaults; unknown or
/// repeated keys are errors. The result is validated.
ExperimentConfig parse_config(std::string_view text);

/// Reads and parses a config file; a missing file is a ConfigError.
ExperimentConfig validate_config(const std::filesystem::path& path);

/// Every recognised key, in canonical order.
const std::vector<std::string>& config_keys();

}  // namespace allocbench
