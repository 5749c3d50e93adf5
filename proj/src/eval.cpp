#include "allocbench/eval.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <tuple>

#include "allocbench/csv_io.hpp"
#include "allocbench/errors.hpp"
#include "allocbench/metrics.hpp"
#include "allocbench/parallel.hpp"
#include "allocbench/random.hpp"

namespace allocbench {
namespace {

std::uint64_t setting_tag(Setting s) { return seed_tag(to_string(s)); }

double sorted_mean(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sorted_sd(std::vector<double> v, double mean) {
    if (v.size() < 2) return 0.0;
    std::sort(v.begin(), v.end());
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

}  // namespace

std::string to_string(Setting s) {
    switch (s) {
        case Setting::baseline: return "baseline";
        case Setting::limited: return "limited";
        case Setting::shifted: return "shifted";
    }
    return "?";
}

Setting parse_setting(const std::string& text) {
    if (text == "baseline") return Setting::baseline;
    if (text == "limited") return Setting::limited;
    if (text == "shifted") return Setting::shifted;
    throw std::invalid_argument("unknown setting '" + text + "' (expected baseline, limited or shifted)");
}

AllocationVector oracle_allocation(std::span<const double> tau_true, std::span<const double> costs,
                                   const PolicySpec& spec, const KnapsackOptions& options) {
    return allocate(spec, tau_true, costs, options);
}

double f1_agreement(const AllocationVector& allocation, const AllocationVector& oracle) {
    if (allocation.decisions.size() != oracle.decisions.size())
        throw std::invalid_argument("f1_agreement: allocation lengths differ");
    std::size_t a = 0, o = 0, both = 0;
    for (std::size_t i = 0; i < oracle.decisions.size(); ++i) {
        a += allocation.decisions[i];
        o += oracle.decisions[i];
        both += allocation.decisions[i] & oracle.decisions[i];
    }
    if (a + o == 0) return 1.0;
    return 2.0 * static_cast<double>(both) / static_cast<double>(a + o);
}

PolicySpec budget_policy(Scenario scenario, double fraction, std::size_t n) {
    switch (scenario) {
        case Scenario::uc: return PolicySpec::unconstrained();
        case Scenario::topk: {
            const auto k = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
            return PolicySpec::top_k(std::min(k, n));
        }
        case Scenario::ce: return PolicySpec::cost_efficient(fraction * static_cast<double>(n));
    }
    throw std::invalid_argument("budget_policy: unknown scenario");
}

std::vector<AggregateRow> aggregate(std::span<const SweepRecord> records) {
    if (records.empty()) throw std::invalid_argument("aggregate: no records");
    using Key = std::tuple<Setting, Scenario, double>;
    std::map<Key, std::pair<std::vector<double>, std::vector<double>>> groups;
    for (const auto& r : records) {
        auto& g = groups[{r.setting, r.scenario, r.budget_fraction}];
        g.first.push_back(r.f1);
        g.second.push_back(r.pehe);
    }
    std::vector<AggregateRow> out;
    for (const auto& [key, values] : groups) {
        AggregateRow row;
        std::tie(row.setting, row.scenario, row.budget_fraction) = key;
        row.n_sims = values.first.size();
        row.f1_mean = sorted_mean(values.first);
        row.f1_sd = sorted_sd(values.first, row.f1_mean);
        row.pehe_mean = sorted_mean(values.second);
        row.pehe_sd = sorted_sd(values.second, row.pehe_mean);
        out.push_back(row);
    }
    return out;
}

Experiment::Experiment(ExperimentConfig config, bool with_shift) : config_(std::move(config)) {
    config_.validate();
    const auto schema = CovariateSchema::jobseekers();
    const std::uint64_t world = config_.dgp_seed;
    coefficients_ = sample_coefficients(schema.size(), derive_seed(world, {seed_tag("coefficients")}), config_.noise_sd);

    const std::vector<double> no_drift(schema.size(), 0.0);
    train_pool_ = standardize(
        generate_covariates(config_.n_train, schema, no_drift, derive_seed(world, {seed_tag("train_covariates")})));
    test_cohort_ = standardize(
        generate_covariates(config_.n_test, schema, config_.drift, derive_seed(world, {seed_tag("test_covariates")})),
        train_pool_.stats);

    test_tau_true_.resize(test_cohort_.rows());
    for (std::size_t i = 0; i < test_cohort_.rows(); ++i)
        test_tau_true_[i] = true_effect(coefficients_, test_cohort_.values.row(i));
    if (!with_shift) return;

    ForestParams forest;
    forest.n_trees = config_.rf_trees;
    forest.max_depth = config_.rf_max_depth;
    forest.p_min = config_.domain_p_min;
    forest.threads = config_.threads;
    const auto classifier =
        fit_domain_classifier(train_pool_.values, test_cohort_.values, forest,
                                                  derive_seed(config_.master_seed, {seed_tag("domain")}));
    domain_probability_ = classifier.probability(train_pool_.values);
    weights_ = shift_weights(domain_probability_, config_.shift_q, config_.signed_weights);
}

std::uint64_t Experiment::simulation_seed(std::size_t sim) const {
    return derive_seed(config_.master_seed, {seed_tag("simulation"), sim});
}

PopulationSample Experiment::training_pool_sample(std::size_t sim) const {
    return simulate_population(coefficients_, train_pool_, derive_seed(simulation_seed(sim), {seed_tag("pool")}));
}

PopulationSample Experiment::training_set(Setting setting, std::size_t sim) const {
    auto pool = training_pool_sample(sim);
    const std::uint64_t seed = derive_seed(simulation_seed(sim), {setting_tag(setting)});
    switch (setting) {
        case Setting::baseline: return pool;
        case Setting::limited: {
            std::vector<std::size_t> idx(pool.size());
            std::iota(idx.begin(), idx.end(), std::size_t{0});
            Rng rng(seed);
            std::shuffle(idx.begin(), idx.end(), rng);
            idx.resize(config_.n_limited);
            std::sort(idx.begin(), idx.end());
            return pool.select_rows(idx);
        }
        case Setting::shifted:
            if (weights_.normalized.empty()) throw ContractError("shifted setting needs the domain classifier");
            return resample_shifted(pool, weights_, config_.resample_size(), seed);
    }
    throw std::invalid_argument("training_set: unknown setting");
}

PopulationSample Experiment::test_sample(std::size_t sim) const {
    auto sample = simulate_population(coefficients_, test_cohort_, derive_seed(simulation_seed(sim), {seed_tag("test")}));
    sample.costs = test_costs(sim);
    return sample;
}

std::vector<double> Experiment::test_costs(std::size_t sim) const {
    return simulate_costs(config_.n_test, derive_seed(simulation_seed(sim), {seed_tag("test_costs")}));
}

XLearnerConfig Experiment::learner_config() const {
    XLearnerConfig lc;
    lc.boosting_grid = config_.boosting_grid();
    lc.logistic_grid = config_.logistic_c;
    lc.folds = config_.cv_folds;
    lc.propensity_clip = config_.propensity_clip;
    lc.threads = 1;
    return lc;
}

CellResult Experiment::fit_cell(Setting setting, std::size_t sim) const {
    CellResult cell;
    cell.setting = setting;
    cell.sim = sim;
    cell.seed = simulation_seed(sim);
    if (config_.oracle_model) {
        cell.tau_hat = test_tau_true_;
    } else {
        const auto train = training_set(setting, sim);
        const std::uint64_t fit_seed = derive_seed(cell.seed, {setting_tag(setting), seed_tag("fit")});
        cell.model = fit_xlearner(train, learner_config(), fit_seed);
        cell.tau_hat = predict_cate(*cell.model, test_cohort_.values);
    }
    cell.pehe = pehe(cell.tau_hat, test_tau_true_);
    return cell;
}

std::vector<SweepRecord> Experiment::evaluate(const CellResult& cell, Scenario scenario) const {
    std::vector<double> costs;
    if (scenario == Scenario::ce) costs = test_costs(cell.sim);
    const KnapsackOptions knapsack{config_.knapsack_node_limit};

    auto record = [&](double fraction) {
        const auto spec = budget_policy(scenario, fraction, config_.n_test);
        const auto estimated = allocate(spec, cell.tau_hat, costs, knapsack);
        const auto oracle = oracle_allocation(test_tau_true_, costs, spec, knapsack);
        for (const auto* a : {&estimated, &oracle})
            if (a->status == SolveStatus::node_limit_hit) ++node_limit_hits_;
        SweepRecord r;
        r.setting = cell.setting;
        r.scenario = scenario;
        r.budget_fraction = scenario == Scenario::uc ? 1.0 : fraction;
        r.seed = cell.seed;
        r.f1 = f1_agreement(estimated, oracle);
        r.pehe = cell.pehe;
        r.n_allocated = estimated.count();
        r.oracle_size = oracle.count();
        return r;
    };

    std::vector<SweepRecord> out;
    if (scenario == Scenario::uc) {
        out.push_back(record(1.0));
    } else {
        for (double f : config_.budget_fractions) out.push_back(record(f));
    }
    return out;
}

std::vector<SweepRecord> run_scenario(const Experiment& experiment, Setting setting, Scenario scenario) {
    std::vector<SweepRecord> out;
    for (std::size_t sim = 0; sim < experiment.config().n_sims; ++sim) {
        const auto records = experiment.evaluate(experiment.fit_cell(setting, sim), scenario);
        out.insert(out.end(), records.begin(), records.end());
    }
    return out;
}

std::vector<SweepRecord> run_all(const Experiment& experiment, int threads, const RunHooks& hooks) {
    const std::size_t n_sims = experiment.config().n_sims;
    const std::size_t n_settings = std::size(kAllSettings);
    const std::size_t n_scenarios = std::size(kAllScenarios);
    // slots[setting][scenario][sim]
    std::vector<std::vector<std::vector<std::vector<SweepRecord>>>> slots(
        n_settings, std::vector<std::vector<std::vector<SweepRecord>>>(n_scenarios,
                                                                        std::vector<std::vector<SweepRecord>>(n_sims)));
    std::mutex log_mutex;
    parallel_for(n_settings * n_sims, threads, [&](std::size_t task) {
        const std::size_t s = task / n_sims;
        const std::size_t sim = task % n_sims;
        CellResult cell;
        try {
            cell = experiment.fit_cell(kAllSettings[s], sim);
            if (hooks.on_cell) hooks.on_cell(cell);
            for (std::size_t sc = 0; sc < n_scenarios; ++sc) slots[s][sc][sim] = experiment.evaluate(cell, kAllScenarios[sc]);
        } catch (const std::exception& e) {
            throw std::runtime_error("cell setting=" + to_string(kAllSettings[s]) + " sim=" + std::to_string(sim) +
                                     ": " + e.what());
        }
        if (hooks.log) {
            std::lock_guard lock(log_mutex);
            *hooks.log << "fitted " << to_string(kAllSettings[s]) << " sim " << sim << " pehe "
                       << format_short(cell.pehe) << '\n';
        }
    });

    std::vector<SweepRecord> out;
    for (const auto& by_scenario : slots)
        for (const auto& by_sim : by_scenario)
            for (const auto& records : by_sim) out.insert(out.end(), records.begin(), records.end());
    return out;
}

void write_results_csv(std::ostream& out, std::span<const SweepRecord> records) {
    out << "setting,scenario,budget_fraction,seed,f1,pehe,n_allocated,oracle_size\n";
    for (const auto& r : records)
        out << to_string(r.setting) << ',' << to_string(r.scenario) << ',' << format_short(r.budget_fraction) << ','
            << r.seed << ',' << format_short(r.f1) << ',' << format_short(r.pehe) << ',' << r.n_allocated << ','
            << r.oracle_size << '\n';
}

void write_aggregate_csv(std::ostream& out, std::span<const AggregateRow> rows) {
    out << "setting,scenario,budget_fraction,f1_mean,f1_sd,pehe_mean,pehe_sd,n_sims\n";
    for (const auto& r : rows)
        out << to_string(r.setting) << ',' << to_string(r.scenario) << ',' << format_short(r.budget_fraction) << ','
            << format_short(r.f1_mean) << ',' << format_short(r.f1_sd) << ',' << format_short(r.pehe_mean) << ','
            << format_short(r.pehe_sd) << ',' << r.n_sims << '\n';
}

std::vector<AggregateRow> parse_aggregate_csv(std::istream& in) {
    static const std::vector<std::string> header = {"setting", "scenario", "budget_fraction", "f1_mean",
                                                    "f1_sd",   "pehe_mean", "pehe_sd",        "n_sims"};
    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(in, line)) throw ParseError(1, "missing header");
    ++line_no;
    if (split_csv_line(line) != header) throw ParseError(line_no, "unexpected header '" + line + "'");

    std::vector<AggregateRow> rows;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != header.size())
            throw ParseError(line_no, "expected " + std::to_string(header.size()) + " fields, got " +
                                          std::to_string(fields.size()));
        try {
            AggregateRow r;
            r.setting = parse_setting(fields[0]);
            r.scenario = parse_scenario(fields[1]);
            r.budget_fraction = parse_double(fields[2]);
            r.f1_mean = parse_double(fields[3]);
            r.f1_sd = parse_double(fields[4]);
            r.pehe_mean = parse_double(fields[5]);
            r.pehe_sd = parse_double(fields[6]);
            const double n = parse_double(fields[7]);
            if (n < 1 || n != std::floor(n)) throw std::invalid_argument("n_sims must be a positive integer");
            r.n_sims = static_cast<std::size_t>(n);
            rows.push_back(r);
        } catch (const std::invalid_argument& e) {
            throw ParseError(line_no, e.what());
        }
    }
    return rows;
}

void write_allocation_csv(std::ostream& out, const AllocationVector& allocation, std::span<const double> tau_used,
                          std::span<const double> costs, const PolicySpec& spec) {
    const std::size_t n = allocation.decisions.size();
    if (tau_used.size() != n || (!costs.empty() && costs.size() != n))
        throw std::invalid_argument("write_allocation_csv: length mismatch");
    std::string budget = "none";
    if (spec.scenario == Scenario::topk) budget = std::to_string(spec.k);
    if (spec.scenario == Scenario::ce) budget = format_exact(spec.budget);
    out << "unit_id,decision,tau_used,cost,scenario,budget\n";
    for (std::size_t i = 0; i < n; ++i)
        out << i << ',' << int{allocation.decisions[i]} << ',' << format_exact(tau_used[i]) << ','
            << (costs.empty() ? std::string("1") : format_exact(costs[i])) << ',' << to_string(spec.scenario) << ','
            << budget << '\n';
}

}  // namespace allocbench
