#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "allocbench/dgp.hpp"
#include "allocbench/errors.hpp"
#include "allocbench/metrics.hpp"
#include "allocbench/shift.hpp"
#include "doctest.h"

using namespace allocbench;

namespace {

Matrix gaussian(std::size_t n, std::size_t d, double offset0, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> z;
    Matrix x(n, d);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < d; ++j) x(i, j) = z(rng) + (j == 0 ? offset0 : 0.0);
    return x;
}

PopulationSample indexed_sample(std::size_t n) {
    PopulationSample s;
    s.x.values = Matrix(n, 2);
    s.x.names = {"a", "b"};
    for (std::size_t i = 0; i < n; ++i) {
        s.x.values(i, 0) = static_cast<double>(i);
        s.x.values(i, 1) = std::sin(static_cast<double>(i));
        s.treatment.push_back(static_cast<int>(i % 2));
        s.y.push_back(10.0 * i);
        s.y0.push_back(10.0 * i);
        s.y1.push_back(10.0 * i + 1);
        s.tau_true.push_back(1.0);
        s.costs.push_back(1.0 + i);
        s.propensity.push_back(0.5);
    }
    return s;
}

}  // namespace

TEST_CASE("shift weight algebra") {
    const double e = std::exp(1.0);
    const std::vector<double> p{0.5, e / (1 + e), 1 / (1 + e)};
    const auto w = shift_weights(p, 6);
    CHECK(w.raw[0] == 0.0);
    CHECK(w.raw[1] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(w.raw[2] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::accumulate(w.normalized.begin(), w.normalized.end(), 0.0) == doctest::Approx(1.0));
    CHECK(w.normalized[1] == doctest::Approx(0.5));

    const auto s = shift_weights(p, 6, true);
    CHECK(s.raw[1] == doctest::Approx(1.0));
    CHECK(s.raw[2] == 0.0);
}

TEST_CASE("shift weights error cases") {
    const std::vector<double> half(4, 0.5);
    CHECK_THROWS_AS(shift_weights(half, 6), AllZeroWeightsError);
    const std::vector<double> p{0.3, 0.8};
    CHECK_THROWS_AS(shift_weights(p, 0), std::invalid_argument);
    const std::vector<double> outside{0.0, 0.8};
    CHECK_THROWS_AS(shift_weights(outside, 6), std::invalid_argument);
}

TEST_CASE("point-mass weights resample one unit") {
    const auto src = indexed_sample(6);
    ShiftWeights w;
    w.raw = {0, 0, 0, 5, 0, 0};
    w.normalized = {0, 0, 0, 1, 0, 0};
    const auto out = resample_shifted(src, w, 40, 3);
    CHECK(out.size() == 40);
    for (std::size_t i = 0; i < 40; ++i) {
        CHECK(out.x.values(i, 0) == 3.0);
        CHECK(out.y[i] == 30.0);
        CHECK(out.costs[i] == 4.0);
        CHECK(out.treatment[i] == 1);
    }
}

TEST_CASE("uniform weights behave like a bootstrap") {
    const std::size_t n = 2000, m = 20000;
    const auto src = indexed_sample(n);
    ShiftWeights w;
    w.raw.assign(n, 1.0);
    w.normalized.assign(n, 1.0 / n);
    const auto out = resample_shifted(src, w, m, 9);
    const auto col = out.x.values.column(0);
    const double mean = std::accumulate(col.begin(), col.end(), 0.0) / m;
    const double source_mean = (n - 1) / 2.0;
    const double source_sd = std::sqrt((double(n) * n - 1) / 12.0);
    CHECK(std::abs(mean - source_mean) < 3 * source_sd / std::sqrt(double(m)));
}

TEST_CASE("resample_shifted rejects length mismatch and is seeded") {
    const auto src = indexed_sample(5);
    ShiftWeights w;
    w.raw.assign(4, 1.0);
    w.normalized.assign(4, 0.25);
    CHECK_THROWS_AS(resample_shifted(src, w, 5, 1), std::invalid_argument);
    w.raw.assign(5, 1.0);
    w.normalized.assign(5, 0.2);
    CHECK(draw_weighted_indices(w.normalized, 50, 4) == draw_weighted_indices(w.normalized, 50, 4));
}

TEST_CASE("domain classifier: identical domains give probability near 0.5") {
    const auto x = gaussian(600, 3, 0.0, 1);
    ForestParams params;
    params.n_trees = 30;
    const auto clf = fit_domain_classifier(x, x, params, 2);
    const auto p = clf.probability(x);
    const double mean = std::accumulate(p.begin(), p.end(), 0.0) / p.size();
    CHECK(std::abs(mean - 0.5) < 0.05);
    for (double v : p) {
        CHECK(v >= 1e-3);
        CHECK(v <= 1 - 1e-3);
    }
    CHECK(clf.n_source() == 600);
    CHECK(clf.n_target() == 600);
}

TEST_CASE("domain classifier separates far-apart domains") {
    const auto a = gaussian(400, 3, 0.0, 3);
    const auto b = gaussian(400, 3, 8.0, 4);
    ForestParams params;
    params.n_trees = 30;
    CHECK(holdout_domain_auc(a, b, params, 5) > 0.95);
}

TEST_CASE("domain classifier determinism and validation") {
    const auto a = gaussian(200, 3, 0.0, 6);
    const auto b = gaussian(200, 3, 0.7, 7);
    ForestParams params;
    params.n_trees = 20;
    const auto c1 = fit_domain_classifier(a, b, params, 8);
    params.threads = 3;
    const auto c2 = fit_domain_classifier(a, b, params, 8);
    CHECK(c1.probability(a) == c2.probability(a));
    CHECK_THROWS_AS(fit_domain_classifier(a, gaussian(200, 4, 0, 1), params, 8), std::invalid_argument);
}

TEST_CASE("shift diagnostics csv") {
    const std::vector<double> p{0.2, 0.5, 0.9};
    const auto w = shift_weights(p, 2);
    std::ostringstream out;
    write_shift_diagnostics_csv(out, p, w);
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "unit_id,sigma,raw_weight,normalized_weight");
    std::getline(in, line);
    CHECK(line.rfind("0,0.2", 0) == 0);
}

TEST_CASE("roc_auc and spearman against hand values") {
    const std::vector<double> s{0.1, 0.4, 0.35, 0.8};
    const std::vector<int> l{0, 0, 1, 1};
    CHECK(roc_auc(s, l) == doctest::Approx(0.75));
    const std::vector<double> tied{0.5, 0.5};
    const std::vector<int> l2{0, 1};
    CHECK(roc_auc(tied, l2) == doctest::Approx(0.5));
    const std::vector<double> a{1, 2, 3, 4}, b{10, 20, 30, 40}, c{4, 3, 2, 1};
    CHECK(spearman_correlation(a, b) == doctest::Approx(1.0));
    CHECK(spearman_correlation(a, c) == doctest::Approx(-1.0));
    CHECK(average_ranks(std::vector<double>{3, 1, 3}) == std::vector<double>{2.5, 1, 2.5});
}
