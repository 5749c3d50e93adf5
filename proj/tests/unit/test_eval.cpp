#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include "allocbench/errors.hpp"
#include "allocbench/eval.hpp"
#include "allocbench/metrics.hpp"
#include "doctest.h"
#include "tiny_config.hpp"

using namespace allocbench;

namespace {

AllocationVector from_set(std::size_t n, std::initializer_list<std::size_t> units) {
    AllocationVector a;
    a.decisions.assign(n, 0);
    for (std::size_t u : units) a.decisions[u] = 1;
    return a;
}

SweepRecord record(Setting s, Scenario sc, double f, double f1, double pehe) {
    SweepRecord r;
    r.setting = s;
    r.scenario = sc;
    r.budget_fraction = f;
    r.f1 = f1;
    r.pehe = pehe;
    return r;
}

}  // namespace

TEST_CASE("f1 agreement hand cases") {
    CHECK(f1_agreement(from_set(4, {1, 2}), from_set(4, {1, 2})) == 1.0);
    CHECK(f1_agreement(from_set(4, {0}), from_set(4, {3})) == 0.0);
    CHECK(f1_agreement(from_set(4, {0, 1}), from_set(4, {1, 2})) == 0.5);
    CHECK(f1_agreement(from_set(4, {}), from_set(4, {})) == 1.0);
    CHECK(f1_agreement(from_set(4, {}), from_set(4, {2})) == 0.0);
    CHECK(f1_agreement(from_set(4, {0, 1, 3}), from_set(4, {1})) ==
          f1_agreement(from_set(4, {1}), from_set(4, {0, 1, 3})));
    CHECK_THROWS_AS(f1_agreement(from_set(3, {}), from_set(4, {})), std::invalid_argument);
}

TEST_CASE("oracle allocation applies the policy to true effects") {
    const std::vector<double> tau{0.1, -0.1};
    CHECK(oracle_allocation(tau, {}, PolicySpec::unconstrained()).decisions == std::vector<std::uint8_t>{1, 0});
    const std::vector<double> two{0.2, 0.9};
    CHECK(oracle_allocation(two, {}, PolicySpec::top_k(1)).selected() == std::vector<std::size_t>{1});
    const std::vector<double> costs{1.0, 1.0};
    for (const auto& spec : {PolicySpec::unconstrained(), PolicySpec::top_k(1), PolicySpec::cost_efficient(1.0)}) {
        const auto o = oracle_allocation(two, costs, spec);
        CHECK(f1_agreement(o, o) == 1.0);
    }
}

TEST_CASE("pehe hand cases") {
    const std::vector<double> a{1, 3}, b{1, 1};
    CHECK(pehe(a, a) == 0.0);
    CHECK(pehe(a, b) == doctest::Approx(std::sqrt(2.0)));
    const std::vector<double> shifted{1.25, 3.25};
    CHECK(pehe(shifted, a) == doctest::Approx(0.25));
    CHECK_THROWS_AS(pehe(std::vector<double>{}, std::vector<double>{}), std::invalid_argument);
}

TEST_CASE("budget policy arithmetic") {
    CHECK(budget_policy(Scenario::topk, 0.1, 5000).k == 500);
    CHECK(budget_policy(Scenario::topk, 0.15, 10).k == 2);
    CHECK(budget_policy(Scenario::ce, 0.25, 200).budget == 50.0);
    CHECK(budget_policy(Scenario::uc, 0.3, 10).scenario == Scenario::uc);
}

TEST_CASE("aggregate: mean, sample sd, order invariance") {
    std::vector<SweepRecord> recs{record(Setting::baseline, Scenario::topk, 0.1, 0.4, 1.0),
                                  record(Setting::baseline, Scenario::topk, 0.1, 0.6, 3.0),
                                  record(Setting::shifted, Scenario::uc, 1.0, 0.7, 2.0)};
    const auto rows = aggregate(recs);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].f1_mean == doctest::Approx(0.5));
    CHECK(rows[0].f1_sd == doctest::Approx(0.1414213562));
    CHECK(rows[0].pehe_mean == doctest::Approx(2.0));
    CHECK(rows[0].n_sims == 2);
    CHECK(rows[1].f1_sd == 0.0);

    std::vector<SweepRecord> many;
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u;
    for (int i = 0; i < 40; ++i)
        many.push_back(record(i % 2 ? Setting::limited : Setting::baseline, Scenario::ce, 0.05 * (1 + i % 3), u(rng),
                              u(rng)));
    const auto expected = aggregate(many);
    for (int k = 0; k < 5; ++k) {
        std::shuffle(many.begin(), many.end(), rng);
        CHECK(aggregate(many) == expected);
    }
    CHECK_THROWS_AS(aggregate(std::vector<SweepRecord>{}), std::invalid_argument);
}

TEST_CASE("aggregate csv round trip and parse errors") {
    std::vector<SweepRecord> recs{record(Setting::limited, Scenario::ce, 0.25, 0.3, 1.5),
                                  record(Setting::limited, Scenario::ce, 0.25, 0.5, 2.5)};
    const auto rows = aggregate(recs);
    std::stringstream buf;
    write_aggregate_csv(buf, rows);
    const auto parsed = parse_aggregate_csv(buf);
    REQUIRE(parsed.size() == 1);
    CHECK(parsed[0].f1_mean == doctest::Approx(0.4));
    CHECK(parsed[0].setting == Setting::limited);

    std::istringstream bad("setting,scenario,budget_fraction,f1_mean,f1_sd,pehe_mean,pehe_sd,n_sims\n"
                           "baseline,TOPK,0.1,0.5,0.1,1,0,10\n"
                           "baseline,TOPK,0.2,oops,0.1,1,0,10\n");
    try {
        parse_aggregate_csv(bad);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line() == 3);
    }
    std::istringstream wrong_header("a,b\n");
    CHECK_THROWS_AS(parse_aggregate_csv(wrong_header), ParseError);
    CHECK_THROWS_AS(parse_setting("shift"), std::invalid_argument);
}

TEST_CASE("experiment setup: cohorts, weights and training sets") {
    const Experiment exp(tiny_config());
    CHECK(exp.train_pool().rows() == 300);
    CHECK(exp.test_cohort().rows() == 200);
    CHECK(exp.train_pool().standardized);
    CHECK(exp.test_tau_true().size() == 200);
    CHECK(exp.domain_probability().size() == 300);
    CHECK(exp.weights().normalized.size() == 300);

    CHECK(exp.training_set(Setting::baseline, 0).size() == 300);
    const auto limited = exp.training_set(Setting::limited, 0);
    CHECK(limited.size() == 80);
    const auto pool = exp.training_pool_sample(0);
    std::set<std::vector<double>> pool_rows;
    for (std::size_t i = 0; i < pool.size(); ++i) {
        auto r = pool.x.values.row(i);
        pool_rows.insert({r.begin(), r.end()});
    }
    std::set<std::vector<double>> limited_rows;
    for (std::size_t i = 0; i < limited.size(); ++i) {
        auto r = limited.x.values.row(i);
        CHECK(pool_rows.count({r.begin(), r.end()}) == 1);
        limited_rows.insert({r.begin(), r.end()});
    }
    CHECK(limited_rows.size() == 80);
    CHECK(exp.training_set(Setting::shifted, 0).size() == 300);
    CHECK(exp.training_set(Setting::shifted, 1).y != exp.training_set(Setting::shifted, 0).y);
    CHECK(exp.test_costs(0) == exp.test_costs(0));
    CHECK(exp.test_costs(0) != exp.test_costs(1));

    const Experiment no_shift(tiny_config(), false);
    CHECK_THROWS_AS(no_shift.training_set(Setting::shifted, 0), ContractError);
}

TEST_CASE("evaluate: UC ignores budgets, oracle model scores 1") {
    auto cfg = tiny_config();
    const Experiment exp(cfg);
    const auto cell = exp.fit_cell(Setting::baseline, 0);
    CHECK(cell.model.has_value());
    CHECK(cell.tau_hat.size() == 200);
    const auto uc = exp.evaluate(cell, Scenario::uc);
    REQUIRE(uc.size() == 1);
    CHECK(uc[0].budget_fraction == 1.0);
    const auto topk = exp.evaluate(cell, Scenario::topk);
    CHECK(topk.size() == 2);
    for (const auto& r : topk) {
        CHECK(r.f1 >= 0.0);
        CHECK(r.f1 <= 1.0);
        CHECK(r.pehe == cell.pehe);
    }

    cfg.oracle_model = true;
    const Experiment oracle(cfg);
    for (Setting s : kAllSettings)
        for (Scenario sc : kAllScenarios)
            for (const auto& r : run_scenario(oracle, s, sc)) {
                CHECK(r.f1 == 1.0);
                CHECK(r.pehe == 0.0);
            }
}

TEST_CASE("run_all ordering and thread independence") {
    auto cfg = tiny_config();
    cfg.n_sims = 2;
    const Experiment exp(cfg);
    const auto a = run_all(exp, 1);
    const auto b = run_all(exp, 3);
    CHECK(a == b);
    // 3 settings x 2 sims x (1 UC + 2 TOPK + 2 CE)
    CHECK(a.size() == 30);
    CHECK(a.front().setting == Setting::baseline);
    CHECK(a.front().scenario == Scenario::uc);
    CHECK(a.back().setting == Setting::shifted);
    CHECK(a.back().scenario == Scenario::ce);
    CHECK(exp.node_limit_hits() == 0);

    std::ostringstream out;
    write_results_csv(out, a);
    CHECK(out.str().rfind("setting,scenario,budget_fraction,seed,f1,pehe,n_allocated,oracle_size\n", 0) == 0);
}

TEST_CASE("dgp_seed fixes the world, master_seed varies the simulations") {
    auto cfg = tiny_config();
    const Experiment a(cfg);
    cfg.master_seed += 1;
    const Experiment b(cfg);
    CHECK(a.train_pool().values == b.train_pool().values);
    CHECK(a.test_tau_true() == b.test_tau_true());
    CHECK(a.training_pool_sample(0).y != b.training_pool_sample(0).y);
    cfg.dgp_seed += 1;
    const Experiment c(cfg);
    CHECK(a.test_tau_true() != c.test_tau_true());
}
