#include "allocbench/cross_validation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>
#include <utility>

#include "allocbench/parallel.hpp"
#include "allocbench/random.hpp"

namespace allocbench {
namespace {

void check_folds(std::size_t n, int folds) {
    if (folds < 2) throw std::invalid_argument("cross_validate: need at least 2 folds");
    if (n < static_cast<std::size_t>(folds))
        throw std::invalid_argument("cross_validate: " + std::to_string(n) + " rows is fewer than " +
                                    std::to_string(folds) + " folds");
}

struct FoldSplit {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
};

std::vector<FoldSplit> split_by_fold(std::span<const int> fold_of, int folds) {
    std::vector<FoldSplit> splits(static_cast<std::size_t>(folds));
    for (std::size_t i = 0; i < fold_of.size(); ++i)
        for (int f = 0; f < folds; ++f)
            (f == fold_of[i] ? splits[static_cast<std::size_t>(f)].test : splits[static_cast<std::size_t>(f)].train)
                .push_back(i);
    return splits;
}

template <typename T>
std::vector<T> gather(std::span<const T> v, std::span<const std::size_t> idx) {
    std::vector<T> out;
    out.reserve(idx.size());
    for (std::size_t i : idx) out.push_back(v[i]);
    return out;
}

template <typename Params>
CvResult<Params> pick_best(std::span<const Params> grid, std::vector<double> scores) {
    CvResult<Params> result;
    result.scores = std::move(scores);
    for (std::size_t g = 1; g < grid.size(); ++g)
        if (result.scores[g] < result.scores[result.best_index]) result.best_index = g;
    result.best = grid[result.best_index];
    return result;
}

}  // namespace

std::vector<int> assign_folds(std::size_t n, int folds, std::uint64_t seed) {
    check_folds(n, folds);
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    Rng rng(seed);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<int> fold_of(n);
    for (std::size_t pos = 0; pos < n; ++pos) fold_of[perm[pos]] = static_cast<int>(pos % static_cast<std::size_t>(folds));
    return fold_of;
}

std::vector<int> assign_stratified_folds(std::span<const int> labels, int folds, std::uint64_t seed) {
    check_folds(labels.size(), folds);
    Rng rng(seed);
    std::vector<int> fold_of(labels.size());
    std::size_t dealt = 0;
    for (int cls : {0, 1}) {
        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < labels.size(); ++i)
            if (labels[i] == cls) members.push_back(i);
        std::shuffle(members.begin(), members.end(), rng);
        // Continue dealing where the previous class stopped to balance fold sizes.
        for (std::size_t m : members) fold_of[m] = static_cast<int>(dealt++ % static_cast<std::size_t>(folds));
    }
    return fold_of;
}

CvResult<BoostingParams> cross_validate(std::span<const BoostingParams> grid, const Matrix& x,
                                        std::span<const double> y, int folds, std::uint64_t seed, int threads) {
    if (grid.empty()) throw std::invalid_argument("cross_validate: empty grid");
    if (y.size() != x.rows()) throw std::invalid_argument("cross_validate: target length mismatch");
    check_folds(x.rows(), folds);
    for (const auto& p : grid) validate(p);

    // (learning_rate, max_depth) -> largest n_estimators requested.
    std::map<std::pair<double, int>, int> families;
    for (const auto& p : grid) {
        auto& longest = families[{p.learning_rate, p.max_depth}];
        longest = std::max(longest, p.n_estimators);
    }
    std::vector<BoostingParams> family_params;
    for (const auto& [key, n] : families) family_params.push_back({key.first, key.second, n});

    const auto splits = split_by_fold(assign_folds(x.rows(), folds, seed), folds);
    const std::size_t n_folds = splits.size();
    // mse[family][fold][stage count], evaluated for every stage 0..n_estimators.
    std::vector<std::vector<std::vector<double>>> mse(family_params.size(),
                                                      std::vector<std::vector<double>>(n_folds));

    parallel_for(family_params.size() * n_folds, threads, [&](std::size_t task) {
        const std::size_t fam = task / n_folds;
        const std::size_t fold = task % n_folds;
        const auto& split = splits[fold];
        const Matrix train_x = x.select_rows(split.train);
        const auto train_y = gather<double>(y, split.train);
        const Matrix test_x = x.select_rows(split.test);
        const auto model = fit_gradient_boosting(train_x, train_y, family_params[fam]);

        const std::size_t stages = model.trees().size();
        std::vector<double> sq_err(stages + 1, 0.0);
        for (std::size_t i = 0; i < split.test.size(); ++i) {
            const auto row = test_x.row(i);
            const double target = y[split.test[i]];
            // Same accumulation order as GradientBoostedModel::predict.
            double f = model.init();
            sq_err[0] += (target - f) * (target - f);
            for (std::size_t t = 0; t < stages; ++t) {
                f += model.params().learning_rate * model.trees()[t].predict(row);
                sq_err[t + 1] += (target - f) * (target - f);
            }
        }
        for (auto& e : sq_err) e /= static_cast<double>(split.test.size());
        mse[fam][fold] = std::move(sq_err);
    });

    std::vector<double> scores(grid.size());
    for (std::size_t g = 0; g < grid.size(); ++g) {
        const auto fam = static_cast<std::size_t>(std::distance(
            families.begin(), families.find({grid[g].learning_rate, grid[g].max_depth})));
        double total = 0.0;
        for (std::size_t fold = 0; fold < n_folds; ++fold)
            total += mse[fam][fold][static_cast<std::size_t>(grid[g].n_estimators)];
        scores[g] = total / static_cast<double>(n_folds);
    }
    return pick_best(grid, std::move(scores));
}

CvResult<double> cross_validate(std::span<const double> c_grid, const Matrix& x, std::span<const int> labels,
                                int folds, std::uint64_t seed, const LogisticOptions& options) {
    if (c_grid.empty()) throw std::invalid_argument("cross_validate: empty grid");
    if (labels.size() != x.rows()) throw std::invalid_argument("cross_validate: label length mismatch");
    const auto splits = split_by_fold(assign_stratified_folds(labels, folds, seed), folds);

    constexpr double kEps = 1e-15;
    std::vector<double> scores(c_grid.size(), 0.0);
    for (const auto& split : splits) {
        const Matrix train_x = x.select_rows(split.train);
        const auto train_t = gather<int>(labels, split.train);
        const Matrix test_x = x.select_rows(split.test);
        for (std::size_t g = 0; g < c_grid.size(); ++g) {
            const auto model = fit_logistic(train_x, train_t, c_grid[g], options);
            double loss = 0.0;
            for (std::size_t i = 0; i < split.test.size(); ++i) {
                const double p = std::clamp(model.probability(test_x.row(i)), kEps, 1.0 - kEps);
                loss -= labels[split.test[i]] == 1 ? std::log(p) : std::log1p(-p);
            }
            scores[g] += loss / static_cast<double>(split.test.size());
        }
    }
    for (auto& s : scores) s /= static_cast<double>(splits.size());
    return pick_best(c_grid, std::move(scores));
}

}  // namespace allocbench
