#include "allocbench/policy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace allocbench {
namespace {

void check_costs(std::span<const double> tau, std::span<const double> costs, double budget) {
    if (costs.size() != tau.size()) throw std::invalid_argument("knapsack: costs and tau lengths differ");
    for (std::size_t i = 0; i < costs.size(); ++i)
        if (!(costs[i] > 0.0) || !std::isfinite(costs[i]))
            throw std::invalid_argument("knapsack: cost of unit " + std::to_string(i) + " must be positive");
    if (!(budget >= 0.0)) throw std::invalid_argument("knapsack: budget must be >= 0");
}

// Unit indices ordered by decreasing value density, ties by lower index.
std::vector<std::size_t> density_order(std::span<const std::size_t> units, std::span<const double> tau,
                                       std::span<const double> costs) {
    std::vector<std::size_t> order(units.begin(), units.end());
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const double da = tau[a] / costs[a];
        const double db = tau[b] / costs[b];
        if (da != db) return da > db;
        return a < b;
    });
    return order;
}

AllocationVector from_selection(std::size_t n, std::span<const std::size_t> chosen, std::span<const double> tau) {
    AllocationVector out;
    out.decisions.assign(n, 0);
    for (std::size_t i : chosen) {
        out.decisions[i] = 1;
        out.objective_value += tau[i];
    }
    return out;
}

}  // namespace

std::string to_string(Scenario s) {
    switch (s) {
        case Scenario::uc: return "UC";
        case Scenario::topk: return "TOPK";
        case Scenario::ce: return "CE";
    }
    return "?";
}

Scenario parse_scenario(const std::string& text) {
    if (text == "UC") return Scenario::uc;
    if (text == "TOPK") return Scenario::topk;
    if (text == "CE") return Scenario::ce;
    throw std::invalid_argument("unknown scenario '" + text + "' (expected UC, TOPK or CE)");
}

std::string to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::optimal: return "optimal";
        case SolveStatus::optimal_filtered: return "optimal-filtered";
        case SolveStatus::node_limit_hit: return "node-limit-hit";
    }
    return "?";
}

std::size_t AllocationVector::count() const {
    return static_cast<std::size_t>(std::count(decisions.begin(), decisions.end(), std::uint8_t{1}));
}

std::vector<std::size_t> AllocationVector::selected() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < decisions.size(); ++i)
        if (decisions[i]) out.push_back(i);
    return out;
}

AllocationVector allocate_unconstrained(std::span<const double> tau) {
    std::vector<std::size_t> chosen;
    for (std::size_t i = 0; i < tau.size(); ++i)
        if (tau[i] > 0.0) chosen.push_back(i);
    return from_selection(tau.size(), chosen, tau);
}

AllocationVector allocate_topk(std::span<const double> tau, std::size_t k) {
    if (k > tau.size())
        throw std::invalid_argument("allocate_topk: k = " + std::to_string(k) + " exceeds n = " +
                                    std::to_string(tau.size()));
    std::vector<std::size_t> positive;
    for (std::size_t i = 0; i < tau.size(); ++i)
        if (tau[i] > 0.0) positive.push_back(i);
    const std::size_t take = std::min(k, positive.size());
    std::partial_sort(positive.begin(), positive.begin() + static_cast<std::ptrdiff_t>(take), positive.end(),
                      [&](std::size_t a, std::size_t b) { return tau[a] != tau[b] ? tau[a] > tau[b] : a < b; });
    positive.resize(take);
    std::sort(positive.begin(), positive.end());
    return from_selection(tau.size(), positive, tau);
}

AllocationVector allocate_cost_efficient(std::span<const double> tau, std::span<const double> costs, double budget,
                                         const KnapsackOptions& options) {
    check_costs(tau, costs, budget);
    std::vector<std::size_t> positive;
    for (std::size_t i = 0; i < tau.size(); ++i)
        if (tau[i] > 0.0) positive.push_back(i);
    const bool filtered = positive.size() < tau.size();

    const auto items = density_order(positive, tau, costs);
    const std::size_t m = items.size();
    std::vector<double> value(m), cost(m), prefix_value(m + 1, 0.0), prefix_cost(m + 1, 0.0);
    std::vector<double> suffix_min_cost(m + 1, std::numeric_limits<double>::infinity());
    for (std::size_t p = 0; p < m; ++p) {
        value[p] = tau[items[p]];
        cost[p] = costs[items[p]];
        prefix_value[p + 1] = prefix_value[p] + value[p];
        prefix_cost[p + 1] = prefix_cost[p] + cost[p];
    }
    for (std::size_t p = m; p-- > 0;) suffix_min_cost[p] = std::min(suffix_min_cost[p + 1], cost[p]);

    // Dantzig bound: items from `p` on taken greedily, the critical one fractionally.
    auto relaxation_bound = [&](std::size_t p, double capacity) {
        const double limit = prefix_cost[p] + capacity;
        const auto it = std::upper_bound(prefix_cost.begin() + static_cast<std::ptrdiff_t>(p) + 1, prefix_cost.end(), limit);
        const auto j = static_cast<std::size_t>(std::distance(prefix_cost.begin(), it)) - 1;  // prefix_cost[j] <= limit
        double bound = prefix_value[j] - prefix_value[p];
        if (j < m) bound += (limit - prefix_cost[j]) * value[j] / cost[j];
        return bound;
    };

    struct Frame {
        std::size_t p;
        double value;
        double cost;
        int stage;
    };
    std::vector<std::uint8_t> in(m, 0);
    std::vector<std::uint8_t> best_in(m, 0);
    double best_value = 0.0;
    double best_cost = 0.0;
    std::uint64_t nodes = 0;
    bool exhausted = false;

    std::vector<Frame> stack;
    stack.reserve(m + 1);
    stack.push_back({0, 0.0, 0.0, 0});
    while (!stack.empty()) {
        Frame& f = stack.back();
        if (f.stage == 0) {
            if (++nodes > options.node_limit) {
                exhausted = true;
                break;
            }
            if (f.p == m || f.cost + suffix_min_cost[f.p] > budget) {
                if (f.value > best_value) {
                    best_value = f.value;
                    best_cost = f.cost;
                    best_in = in;
                }
                stack.pop_back();
                continue;
            }
            const double slack = 1e-9 * (1.0 + std::abs(best_value));
            if (f.value + relaxation_bound(f.p, budget - f.cost) <= best_value - slack) {
                stack.pop_back();
                continue;
            }
            f.stage = 1;
            if (f.cost + cost[f.p] <= budget) {
                in[f.p] = 1;
                const Frame child{f.p + 1, f.value + value[f.p], f.cost + cost[f.p], 0};
                stack.push_back(child);
            }
        } else if (f.stage == 1) {
            in[f.p] = 0;
            f.stage = 2;
            const Frame child{f.p + 1, f.value, f.cost, 0};
            stack.push_back(child);
        } else {
            stack.pop_back();
        }
    }

    std::vector<std::size_t> chosen;
    for (std::size_t p = 0; p < m; ++p)
        if (best_in[p]) chosen.push_back(items[p]);
    AllocationVector out = from_selection(tau.size(), chosen, tau);
    out.objective_value = best_value;
    out.spent = best_cost;
    out.status = exhausted ? SolveStatus::node_limit_hit
                           : (filtered ? SolveStatus::optimal_filtered : SolveStatus::optimal);
    return out;
}

AllocationVector knapsack_brute_force(std::span<const double> tau, std::span<const double> costs, double budget) {
    check_costs(tau, costs, budget);
    const std::size_t n = tau.size();
    if (n > 25) throw std::invalid_argument("knapsack_brute_force: refusing n > 25");

    std::vector<std::size_t> all(n);
    std::iota(all.begin(), all.end(), std::size_t{0});
    const auto order = density_order(all, tau, costs);

    // Bit (n - 1 - p) stands for sorted position p, so counting down visits
    // subsets in the solver's include-first order.
    const std::uint64_t full = (std::uint64_t{1} << n) - 1;
    std::uint64_t best_mask = 0;
    double best_value = -std::numeric_limits<double>::infinity();
    double best_cost = 0.0;
    std::size_t best_nonpositive = 0;
    for (std::uint64_t mask = full + 1; mask-- > 0;) {
        double v = 0.0, c = 0.0;
        std::size_t nonpositive = 0;
        for (std::size_t p = 0; p < n; ++p) {
            if (!((mask >> (n - 1 - p)) & 1U)) continue;
            v += tau[order[p]];
            c += costs[order[p]];
            if (!(tau[order[p]] > 0.0)) ++nonpositive;
        }
        if (c > budget) continue;
        if (v > best_value || (v == best_value && nonpositive < best_nonpositive)) {
            best_value = v;
            best_cost = c;
            best_mask = mask;
            best_nonpositive = nonpositive;
        }
    }
    std::vector<std::size_t> chosen;
    for (std::size_t p = 0; p < n; ++p)
        if ((best_mask >> (n - 1 - p)) & 1U) chosen.push_back(order[p]);
    AllocationVector out = from_selection(n, chosen, tau);
    out.objective_value = best_value;
    out.spent = best_cost;
    return out;
}

AllocationVector allocate(const PolicySpec& spec, std::span<const double> tau, std::span<const double> costs,
                          const KnapsackOptions& options) {
    switch (spec.scenario) {
        case Scenario::uc: return allocate_unconstrained(tau);
        case Scenario::topk: return allocate_topk(tau, spec.k);
        case Scenario::ce: return allocate_cost_efficient(tau, costs, spec.budget, options);
    }
    throw std::invalid_argument("allocate: unknown scenario");
}

}  // namespace allocbench
