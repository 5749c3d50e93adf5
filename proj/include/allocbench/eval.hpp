#pragma once

// Allocation-quality evaluation: oracle allocations from true effects, F1
// agreement between estimated and oracle allocations, budget sweeps over the
// baseline / limited-data / shifted training settings, and aggregation over
// outcome simulations.

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "allocbench/config.hpp"
#include "allocbench/dgp.hpp"
#include "allocbench/policy.hpp"
#include "allocbench/shift.hpp"
#include "allocbench/xlearner.hpp"

namespace allocbench {

enum class Setting { baseline, limited, shifted };

inline constexpr Setting kAllSettings[] = {Setting::baseline, Setting::limited, Setting::shifted};
inline constexpr Scenario kAllScenarios[] = {Scenario::uc, Scenario::topk, Scenario::ce};

std::string to_string(Setting s);
Setting parse_setting(const std::string& text);

struct SweepRecord {
    Setting setting = Setting::baseline;
    Scenario scenario = Scenario::uc;
    double budget_fraction = 1.0;  ///< 1.0 for UC, which has no budget
    std::uint64_t seed = 0;        ///< seed of the outcome simulation
    double f1 = 0.0;
    double pehe = 0.0;
    std::size_t n_allocated = 0;
    std::size_t oracle_size = 0;

    friend bool operator==(const SweepRecord&, const SweepRecord&) = default;
};

struct AggregateRow {
    Setting setting = Setting::baseline;
    Scenario scenario = Scenario::uc;
    double budget_fraction = 1.0;
    double f1_mean = 0.0;
    double f1_sd = 0.0;
    double pehe_mean = 0.0;
    double pehe_sd = 0.0;
    std::size_t n_sims = 0;

    friend bool operator==(const AggregateRow&, const AggregateRow&) = default;
};

/// The policy applied to the true effects (and true costs).
AllocationVector oracle_allocation(std::span<const double> tau_true, std::span<const double> costs,
                                   const PolicySpec& spec, const KnapsackOptions& options = {});

/// 2|A n O| / (|A| + |O|); 1 when both sets are empty.
double f1_agreement(const AllocationVector& allocation, const AllocationVector& oracle);

/// TOPK: k = round(fraction * n); CE: budget = fraction * n (mean cost is 1);
/// UC ignores the fraction.
PolicySpec budget_policy(Scenario scenario, double fraction, std::size_t n);

/// Per (setting, scenario, budget) sample mean and standard deviation (n - 1
/// denominator, 0 for a single record) of f1 and pehe, in canonical order.
/// The output does not depend on the order of `records`.
std::vector<AggregateRow> aggregate(std::span<const SweepRecord> records);

/// One fitted training setting of one outcome simulation.
struct CellResult {
    Setting setting = Setting::baseline;
    std::size_t sim = 0;
    std::uint64_t seed = 0;
    std::vector<double> tau_hat;  ///< on the test cohort
    double pehe = 0.0;
    std::optional<XLearnerModel> model;  ///< absent with the oracle model
};

/// Experiment state shared by all cells: DGP coefficients, the standardized
/// training pool and test cohort, and shift weights. Covariates are fixed for
/// the whole experiment; outcomes, treatment and costs are redrawn per
/// simulation.
///
/// Seeds: covariates and coefficients come from derive_seed(dgp_seed, {tag});
/// every other stream is derive_seed(master_seed, {tag, ...}). Simulation s
/// has seed derive_seed(master_seed, {tag("simulation"), s}) and each setting
/// derives its own streams from it, so cells are reproducible in isolation and
/// independent of thread count.
class Experiment {
public:
    /// Without `with_shift` the domain classifier is skipped and the shifted
    /// setting is unavailable.
    explicit Experiment(ExperimentConfig config, bool with_shift = true);

    const ExperimentConfig& config() const noexcept { return config_; }
    const DGPCoefficients& coefficients() const noexcept { return coefficients_; }
    const CovariateMatrix& train_pool() const noexcept { return train_pool_; }
    const CovariateMatrix& test_cohort() const noexcept { return test_cohort_; }
    const std::vector<double>& test_tau_true() const noexcept { return test_tau_true_; }
    const std::vector<double>& domain_probability() const noexcept { return domain_probability_; }
    const ShiftWeights& weights() const noexcept { return weights_; }

    std::uint64_t simulation_seed(std::size_t sim) const;
    PopulationSample training_pool_sample(std::size_t sim) const;
    PopulationSample training_set(Setting setting, std::size_t sim) const;
    PopulationSample test_sample(std::size_t sim) const;
    std::vector<double> test_costs(std::size_t sim) const;
    XLearnerConfig learner_config() const;

    CellResult fit_cell(Setting setting, std::size_t sim) const;
    std::vector<SweepRecord> evaluate(const CellResult& cell, Scenario scenario) const;

    /// CE solves that ran out of nodes so far.
    std::size_t node_limit_hits() const noexcept { return node_limit_hits_.load(); }

private:
    ExperimentConfig config_;
    DGPCoefficients coefficients_;
    CovariateMatrix train_pool_;
    CovariateMatrix test_cohort_;
    std::vector<double> test_tau_true_;
    std::vector<double> domain_probability_;
    ShiftWeights weights_;
    mutable std::atomic<std::size_t> node_limit_hits_{0};
};

/// Records of one (setting, scenario) over all simulations and budgets.
std::vector<SweepRecord> run_scenario(const Experiment& experiment, Setting setting, Scenario scenario);

struct RunHooks {
    std::function<void(const CellResult&)> on_cell;  ///< called once per fitted cell, possibly concurrently
    std::ostream* log = nullptr;
};

/// All settings x scenarios; one fit per (setting, simulation) serves all
/// three scenarios. Records come out ordered by setting, scenario, simulation
/// and budget regardless of `threads`.
std::vector<SweepRecord> run_all(const Experiment& experiment, int threads, const RunHooks& hooks = {});

/// setting,scenario,budget_fraction,seed,f1,pehe,n_allocated,oracle_size
void write_results_csv(std::ostream& out, std::span<const SweepRecord> records);
/// setting,scenario,budget_fraction,f1_mean,f1_sd,pehe_mean,pehe_sd,n_sims
void write_aggregate_csv(std::ostream& out, std::span<const AggregateRow> rows);
/// Throws ParseError with the 1-based line number on malformed input.
std::vector<AggregateRow> parse_aggregate_csv(std::istream& in);

/// unit_id,decision,tau_used,cost,scenario,budget
void write_allocation_csv(std::ostream& out, const AllocationVector& allocation, std::span<const double> tau_used,
                          std::span<const double> costs, const PolicySpec& spec);

}  // namespace allocbench
