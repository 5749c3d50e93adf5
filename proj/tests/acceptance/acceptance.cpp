// Acceptance checks A1-A10. Prints one [PASS]/[FAIL] line per criterion and
// exits nonzero if any fails. Outputs of the experiment runs are kept under
// the working directory in acceptance_out/.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "allocbench/config.hpp"
#include "allocbench/csv_io.hpp"
#include "allocbench/dgp.hpp"
#include "allocbench/eval.hpp"
#include "allocbench/experiment.hpp"
#include "allocbench/logistic.hpp"
#include "allocbench/metrics.hpp"
#include "allocbench/policy.hpp"
#include "allocbench/random.hpp"
#include "allocbench/shift.hpp"
#include "allocbench/xlearner.hpp"

using namespace allocbench;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

int failures = 0;

void report(const char* id, const char* title, const std::function<Outcome()>& check) {
    Outcome o;
    const auto start = std::chrono::steady_clock::now();
    try {
        o = check();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!o.pass) ++failures;
    std::printf("[%s] %s %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", id, title, o.detail.c_str(), secs);
    std::fflush(stdout);
}

std::string fmt(double v) { return format_short(v); }

int worker_threads() { return static_cast<int>(std::max(1u, std::thread::hardware_concurrency())); }

// Independent enumeration of all subsets: best objective under the budget.
double enumerate_best(const std::vector<double>& tau, const std::vector<double>& cost, double budget) {
    double best = 0.0;
    for (std::uint64_t mask = 0; mask < (1ULL << tau.size()); ++mask) {
        double v = 0, c = 0;
        for (std::size_t i = 0; i < tau.size(); ++i)
            if (mask >> i & 1) {
                v += tau[i];
                c += cost[i];
            }
        if (c <= budget && v > best) best = v;
    }
    return best;
}

Outcome a1() {
    std::mt19937_64 rng(101);
    std::uniform_int_distribution<int> size(1, 18);
    std::lognormal_distribution<double> cost(-0.5, 1.0);
    std::normal_distribution<double> value;
    const auto start = std::chrono::steady_clock::now();
    int objective_mismatch = 0, selection_mismatch = 0, enumeration_mismatch = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = size(rng);
        std::vector<double> tau(n), c(n);
        for (std::size_t i = 0; i < n; ++i) {
            tau[i] = value(rng);
            c[i] = cost(rng);
        }
        const double budget = 0.3 * std::accumulate(c.begin(), c.end(), 0.0);
        const auto solved = allocate_cost_efficient(tau, c, budget);
        const auto brute = knapsack_brute_force(tau, c, budget);
        if (solved.objective_value != brute.objective_value) ++objective_mismatch;
        if (solved.decisions != brute.decisions) ++selection_mismatch;
        if (std::abs(solved.objective_value - enumerate_best(tau, c, budget)) > 1e-12) ++enumeration_mismatch;
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool ok = objective_mismatch == 0 && selection_mismatch == 0 && enumeration_mismatch == 0 && secs < 10.0;
    return {ok, "200 instances, objective mismatches " + std::to_string(objective_mismatch) + ", selection mismatches " +
                    std::to_string(selection_mismatch) + ", plain-enumeration mismatches " +
                    std::to_string(enumeration_mismatch) + ", " + fmt(secs) + " s"};
}

Outcome a2() {
    std::mt19937_64 rng(202);
    std::normal_distribution<double> value;
    std::lognormal_distribution<double> cost(-0.5, 1.0);
    std::uniform_int_distribution<int> size(1, 60);
    int topk_mismatch = 0, uc_mismatch = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = size(rng);
        std::vector<double> tau(n);
        for (auto& t : tau) t = value(rng);
        const std::size_t k = std::uniform_int_distribution<std::size_t>(0, n)(rng);
        const std::vector<double> ones(n, 1.0);
        if (allocate_cost_efficient(tau, ones, static_cast<double>(k)).selected() != allocate_topk(tau, k).selected())
            ++topk_mismatch;
    }
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = size(rng);
        std::vector<double> tau(n), c(n);
        for (std::size_t i = 0; i < n; ++i) {
            tau[i] = value(rng);
            c[i] = cost(rng);
        }
        const double slack = std::accumulate(c.begin(), c.end(), 0.0) + 1.0;
        if (allocate_cost_efficient(tau, c, slack).selected() != allocate_unconstrained(tau).selected()) ++uc_mismatch;
    }
    return {topk_mismatch == 0 && uc_mismatch == 0, "CE(unit costs, C=k) vs TOPK mismatches " +
                                                        std::to_string(topk_mismatch) + "/100, CE(slack) vs UC " +
                                                        std::to_string(uc_mismatch) + "/100"};
}

ExperimentConfig reduced_config() {
    ExperimentConfig c;
    c.n_train = 1000;
    c.n_limited = 200;
    c.n_test = 1000;
    c.n_sims = 5;
    c.threads = worker_threads();
    return c;
}

Outcome a3() {
    const auto out = fs::path("acceptance_out") / "oracle";
    const std::string cmd = std::string(ALLOCBENCH_CLI) + " run --quiet --no-plots --oracle-model --threads " +
                            std::to_string(worker_threads()) + " --seed 3 --out " + out.string() +
                            " --config " + ACCEPTANCE_ORACLE_CONFIG + " > /dev/null";
    const int status = std::system(cmd.c_str());
    if (status != 0) return {false, "cli exit status " + std::to_string(status)};
    std::istringstream in(read_file(out / "results.csv"));
    std::string line;
    std::getline(in, line);
    std::size_t rows = 0, not_one = 0;
    std::map<std::string, int> settings;
    while (std::getline(in, line)) {
        const auto f = split_csv_line(line);
        ++rows;
        ++settings[f[0]];
        if (parse_double(f[4]) != 1.0) ++not_one;
    }
    return {rows > 0 && not_one == 0 && settings.size() == 3,
            std::to_string(rows) + " records over " + std::to_string(settings.size()) + " settings, f1 != 1 in " +
                std::to_string(not_one)};
}

Outcome a4() {
    const std::size_t n = 100000;
    const auto c = simulate_costs(n, derive_seed(404, {seed_tag("costs")}));
    const double mean = std::accumulate(c.begin(), c.end(), 0.0) / n;
    double ss = 0;
    for (double v : c) ss += (v - mean) * (v - mean);
    const double se = std::sqrt(ss / (n - 1) / n);
    const double z = (mean - 1.0) / se;
    return {std::abs(z) < 3.0, "mean " + fmt(mean) + ", se " + fmt(se) + ", |z| " + fmt(std::abs(z))};
}

Outcome a5() {
    const auto schema = CovariateSchema::jobseekers();
    const std::vector<double> no_drift(schema.size(), 0.0);
    const auto train_x = standardize(generate_covariates(20000, schema, no_drift, 501));
    const auto test_x = standardize(generate_covariates(5000, schema, no_drift, 502), train_x.stats);
    auto coeffs = sample_coefficients(schema.size(), 503);
    coeffs.pair_terms.clear();
    coeffs.triple_terms.clear();
    const auto train = simulate_population(coeffs, train_x, 504);
    XLearnerConfig cfg;
    cfg.threads = worker_threads();
    const auto model = fit_xlearner(train, cfg, 505);
    std::vector<double> tau_true(test_x.rows());
    for (std::size_t i = 0; i < test_x.rows(); ++i) tau_true[i] = true_effect(coeffs, test_x.values.row(i));
    const double rho = spearman_correlation(predict_cate(model, test_x.values), tau_true);

    std::mt19937_64 rng(506);
    std::normal_distribution<double> z;
    const auto& x = train_x.values;
    std::vector<int> t(train.treatment.begin(), train.treatment.begin() + 2000);
    const Matrix xs = x.select_rows([] {
        std::vector<std::size_t> idx(2000);
        std::iota(idx.begin(), idx.end(), 0);
        return idx;
    }());
    double worst = 0.0;
    for (int point = 0; point < 10; ++point) {
        std::vector<double> w(xs.cols());
        for (auto& v : w) v = 0.5 * z(rng);
        const double b = 0.5 * z(rng);
        const double c = 1.0;
        const auto g = logistic_gradient(xs, t, c, w, b);
        for (std::size_t k = 0; k <= w.size(); ++k) {
            const double h = 1e-5;
            auto wp = w, wm = w;
            double bp = b, bm = b;
            if (k < w.size()) {
                wp[k] += h;
                wm[k] -= h;
            } else {
                bp += h;
                bm -= h;
            }
            const double fd = (logistic_objective(xs, t, c, wp, bp) - logistic_objective(xs, t, c, wm, bm)) / (2 * h);
            worst = std::max(worst, std::abs(fd - g[k]) / std::max(std::abs(g[k]), 1e-8));
        }
    }
    return {rho > 0.9 && worst < 1e-4,
            "spearman " + fmt(rho) + " (n 20000/5000), worst gradient relative error " + fmt(worst)};
}

Outcome a6() {
    const double e = std::exp(1.0);
    const std::vector<double> probe{0.5, e / (1 + e), 1 / (1 + e)};
    const auto w = shift_weights(probe, 6);
    const bool exact = w.raw[0] == 0.0 && std::abs(w.raw[1] - 1.0) < 1e-12 && std::abs(w.raw[2] - 1.0) < 1e-12;

    std::vector<double> grid(1000);
    for (std::size_t i = 0; i < grid.size(); ++i) grid[i] = (i + 0.5) / grid.size();
    const auto gw = shift_weights(grid, 6);
    std::vector<std::size_t> order(grid.size());
    std::iota(order.begin(), order.end(), 0);
    auto abs_logit = [&](std::size_t i) { return std::abs(std::log(grid[i] / (1 - grid[i]))); };
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return abs_logit(a) < abs_logit(b); });
    std::size_t violations = 0;
    for (std::size_t i = 1; i < order.size(); ++i) {
        const bool strictly_greater = abs_logit(order[i]) > abs_logit(order[i - 1]) + 1e-12;
        if (gw.raw[order[i]] < gw.raw[order[i - 1]] || (strictly_greater && gw.raw[order[i]] <= gw.raw[order[i - 1]]))
            ++violations;
    }
    return {exact && violations == 0, "w(0.5)=" + fmt(w.raw[0]) + ", w(e/(1+e))=" + fmt(w.raw[1]) +
                                          ", w(1/(1+e))=" + fmt(w.raw[2]) + ", monotonicity violations " +
                                          std::to_string(violations) + "/999"};
}

Outcome a7() {
    double shifted_auc = 0, bootstrap_auc = 0;
    std::string per_seed;
    for (std::uint64_t s = 0; s < 5; ++s) {
        ExperimentConfig cfg;
        cfg.master_seed = 700 + s;
        cfg.threads = worker_threads();
        const Experiment exp(cfg);
        const Matrix& source = exp.train_pool().values;
        const auto shifted = exp.training_set(Setting::shifted, 0).x.values;
        std::vector<std::size_t> boot(cfg.n_train);
        Rng rng(derive_seed(cfg.master_seed, {seed_tag("bootstrap")}));
        std::uniform_int_distribution<std::size_t> pick(0, cfg.n_train - 1);
        for (auto& i : boot) i = pick(rng);
        const auto bootstrap = source.select_rows(boot);

        ForestParams forest;
        forest.threads = cfg.threads;
        const std::uint64_t seed = derive_seed(cfg.master_seed, {seed_tag("a7")});
        const double a = holdout_domain_auc(source, shifted, forest, seed);
        const double b = holdout_domain_auc(source, bootstrap, forest, seed);
        shifted_auc += a / 5;
        bootstrap_auc += b / 5;
        per_seed += (s ? "; " : "") + fmt(a) + "/" + fmt(b);
    }
    return {shifted_auc >= 0.6 && bootstrap_auc <= 0.55, "mean AUC shifted-vs-source " + fmt(shifted_auc) +
                                                            ", bootstrap-vs-source " + fmt(bootstrap_auc) +
                                                            " (per seed " + per_seed + ")"};
}

double mean_f1(const std::vector<AggregateRow>& rows, Setting setting, Scenario scenario, double fraction) {
    for (const auto& r : rows)
        if (r.setting == setting && r.scenario == scenario && std::abs(r.budget_fraction - fraction) < 1e-9)
            return r.f1_mean;
    throw std::runtime_error("missing aggregate row");
}

RunSummary full_run;

ExperimentConfig full_config() {
    ExperimentConfig cfg;
    cfg.threads = worker_threads();
    cfg.output_dir = (fs::path("acceptance_out") / "full").string();
    return cfg;
}

// Records of an earlier default-size run in the same directory, if its
// manifest matches the default config.
bool load_full_run(const ExperimentConfig& cfg) {
    const fs::path dir = cfg.output_dir;
    if (!fs::exists(dir / "manifest.cfg") || !fs::exists(dir / "results.csv")) return false;
    if (parse_config(read_file(dir / "manifest.cfg")).to_text() != cfg.to_text()) return false;
    std::istringstream in(read_file(dir / "results.csv"));
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
        const auto f = split_csv_line(line);
        SweepRecord r;
        r.setting = parse_setting(f[0]);
        r.scenario = parse_scenario(f[1]);
        r.budget_fraction = parse_double(f[2]);
        r.seed = std::stoull(f[3]);
        r.f1 = parse_double(f[4]);
        r.pehe = parse_double(f[5]);
        full_run.records.push_back(r);
    }
    full_run.aggregate = aggregate(full_run.records);
    return true;
}

// The default-size experiment shared by A8 and A9. A8 always runs it; A9
// reuses A8's output when present.
const RunSummary& ensure_full_run(bool reuse) {
    const auto cfg = full_config();
    if (full_run.records.empty() && !(reuse && load_full_run(cfg))) full_run = run_experiment(cfg);
    return full_run;
}

Outcome a8() {
    ensure_full_run(false);
    const double full_run_seconds = full_run.wall_seconds;
    const auto& rows = full_run.aggregate;
    const double topk_base = mean_f1(rows, Setting::baseline, Scenario::topk, 0.1);
    const double topk_shift = mean_f1(rows, Setting::shifted, Scenario::topk, 0.1);
    const double uc_base = mean_f1(rows, Setting::baseline, Scenario::uc, 1.0);
    const double uc_shift = mean_f1(rows, Setting::shifted, Scenario::uc, 1.0);
    const double topk_gap = topk_base - topk_shift, uc_gap = uc_base - uc_shift;
    const bool within_time = full_run_seconds < 30 * 60;
    return {topk_shift < topk_base && topk_gap > uc_gap && within_time,
            "TOPK@0.1 baseline " + fmt(topk_base) + " vs shifted " + fmt(topk_shift) + " (gap " + fmt(topk_gap) +
                "), UC gap " + fmt(uc_gap) + "; full run " + fmt(full_run_seconds) + " s on " +
                std::to_string(worker_threads()) + " thread(s), node-limit hits " +
                std::to_string(full_run.node_limit_hits)};
}

Outcome a9() {
    ensure_full_run(true);
    double sum[2] = {0, 0};
    std::size_t count[2] = {0, 0};
    for (const auto& r : full_run.records) {
        if (r.setting == Setting::shifted) continue;
        if (r.scenario != Scenario::uc && r.budget_fraction > 0.5 + 1e-9) continue;
        const int k = r.setting == Setting::limited;
        sum[k] += r.f1;
        ++count[k];
    }
    const double base = sum[0] / count[0], limited = sum[1] / count[1];
    return {limited < base, "mean F1 over UC and budgets <= 0.5: n=5000 " + fmt(base) + ", n=500 " + fmt(limited) +
                                " (" + std::to_string(count[0]) + " records each)"};
}

Outcome a10() {
    auto cfg = reduced_config();
    RunOptions quiet{false, false, nullptr};
    cfg.output_dir = (fs::path("acceptance_out") / "det_a").string();
    const auto a = run_experiment(cfg, quiet);
    cfg.output_dir = (fs::path("acceptance_out") / "det_b").string();
    cfg.threads = 1;
    run_experiment(cfg, quiet);
    const bool identical = read_file(fs::path("acceptance_out") / "det_a" / "results.csv") ==
                           read_file(fs::path("acceptance_out") / "det_b" / "results.csv");

    cfg.master_seed += 1;
    cfg.threads = worker_threads();
    cfg.output_dir = (fs::path("acceptance_out") / "det_c").string();
    const auto c = run_experiment(cfg, quiet);
    std::size_t differing = 0;
    for (std::size_t i = 0; i < a.records.size(); ++i)
        if (a.records[i].f1 != c.records[i].f1 || a.records[i].seed != c.records[i].seed) ++differing;
    std::size_t overlapping = 0;
    for (std::size_t i = 0; i < a.aggregate.size(); ++i) {
        const auto& x = a.aggregate[i];
        const auto& y = c.aggregate[i];
        if (x.f1_mean - x.f1_sd <= y.f1_mean + y.f1_sd && y.f1_mean - y.f1_sd <= x.f1_mean + x.f1_sd) ++overlapping;
    }
    const bool ok = identical && differing > 0 && overlapping == a.aggregate.size();
    return {ok, std::string("same seed results.csv ") + (identical ? "byte-identical" : "DIFFERENT") +
                    " (threads " + std::to_string(worker_threads()) + " vs 1); other seed: " +
                    std::to_string(differing) + "/" + std::to_string(a.records.size()) +
                    " records differ, mean+-sd bands overlap in " + std::to_string(overlapping) + "/" +
                    std::to_string(a.aggregate.size()) + " aggregate rows"};
}

}  // namespace

// Optional arguments restrict the run to the named criteria, e.g. `acceptance A1 A6`.
int main(int argc, char** argv) {
    const std::vector<std::string> only(argv + 1, argv + argc);
    struct Criterion {
        const char* id;
        const char* title;
        Outcome (*check)();
    };
    const Criterion criteria[] = {
        {"A1", "knapsack exactness", a1},
        {"A2", "policy coherence", a2},
        {"A3", "oracle self-agreement", a3},
        {"A4", "cost calibration", a4},
        {"A5", "learner sanity", a5},
        {"A6", "shift-weight algebra", a6},
        {"A7", "shift efficacy", a7},
        {"A8", "directional shift effect (TOPK vs UC)", a8},
        {"A9", "directional limited-data effect", a9},
        {"A10", "determinism", a10},
    };
    fs::create_directories("acceptance_out");
    int ran = 0;
    for (const auto& c : criteria) {
        if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
        report(c.id, c.title, c.check);
        ++ran;
    }
    std::printf("%d of %d criteria failed\n", failures, ran);
    return failures == 0 ? 0 : 1;
}
