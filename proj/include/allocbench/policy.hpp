#pragma once

// Allocation policies that turn a vector of (estimated or true) treatment
// effects into binary treatment decisions.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace allocbench {

enum class Scenario { uc, topk, ce };

/// "UC", "TOPK", "CE".
std::string to_string(Scenario s);
/// Inverse of to_string; throws std::invalid_argument on anything else.
Scenario parse_scenario(const std::string& text);

struct PolicySpec {
    Scenario scenario = Scenario::uc;
    std::size_t k = 0;    ///< TOPK only
    double budget = 0.0;  ///< CE only

    static PolicySpec unconstrained() { return {Scenario::uc, 0, 0.0}; }
    static PolicySpec top_k(std::size_t k) { return {Scenario::topk, k, 0.0}; }
    static PolicySpec cost_efficient(double budget) { return {Scenario::ce, 0, budget}; }
};

enum class SolveStatus { optimal, optimal_filtered, node_limit_hit };

std::string to_string(SolveStatus s);

struct AllocationVector {
    std::vector<std::uint8_t> decisions;
    double objective_value = 0.0;  ///< sum of tau over selected units
    std::optional<double> spent;   ///< sum of costs over selected units (CE)
    SolveStatus status = SolveStatus::optimal;

    std::size_t count() const;
    std::vector<std::size_t> selected() const;
};

/// Treats exactly the units with tau > 0.
AllocationVector allocate_unconstrained(std::span<const double> tau);

/// The k largest strictly positive effects; ties go to the lower index.
/// Selects fewer than k units when fewer effects are positive.
AllocationVector allocate_topk(std::span<const double> tau, std::size_t k);

struct KnapsackOptions {
    std::uint64_t node_limit = 10'000'000;
};

/// Exact 0-1 knapsack: maximizes sum tau_i over the selection subject to
/// sum c_i <= budget.
///
/// Units with tau <= 0 are dropped first (status optimal_filtered when any
/// were). The rest are searched depth-first in decreasing tau/c order (ties by
/// lower index), include-branch first, pruned by the fractional relaxation
/// bound. Among equal objectives the first solution in that order wins. When
/// the node limit is exhausted the best incumbent is returned with status
/// node_limit_hit.
AllocationVector allocate_cost_efficient(std::span<const double> tau, std::span<const double> costs, double budget,
                                         const KnapsackOptions& options = {});

/// Exhaustive enumeration over all 2^n subsets (n <= 25), summing in the same
/// order as the solver. Among equal objectives it prefers fewer units with
/// tau <= 0, then the solver's include-first order.
AllocationVector knapsack_brute_force(std::span<const double> tau, std::span<const double> costs, double budget);

/// Dispatches on spec.scenario; `costs` is only read for CE.
AllocationVector allocate(const PolicySpec& spec, std::span<const double> tau, std::span<const double> costs,
                          const KnapsackOptions& options = {});

}  // namespace allocbench
