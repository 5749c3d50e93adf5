#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "allocbench/boosting.hpp"
#include "allocbench/logistic.hpp"
#include "allocbench/matrix.hpp"

namespace allocbench {

template <typename Params>
struct CvResult {
    Params best{};
    std::size_t best_index = 0;
    std::vector<double> scores;  ///< mean held-out loss per grid entry
};

/// Fold of each row: a seeded permutation dealt round-robin into `folds`.
std::vector<int> assign_folds(std::size_t n, int folds, std::uint64_t seed);

/// As assign_folds, but each class is dealt separately so every fold sees
/// both labels whenever each class has at least `folds` members.
std::vector<int> assign_stratified_folds(std::span<const int> labels, int folds, std::uint64_t seed);

/// K-fold search over a boosting grid scored by mean held-out MSE; ties go to
/// the earliest grid entry. Entries sharing (learning_rate, max_depth) are
/// scored from the staged predictions of one fit with the largest
/// n_estimators.
CvResult<BoostingParams> cross_validate(std::span<const BoostingParams> grid, const Matrix& x,
                                        std::span<const double> y, int folds, std::uint64_t seed,
                                        int threads = 1);

/// K-fold search over inverse regularization strengths scored by mean
/// held-out log-loss, with stratified folds.
CvResult<double> cross_validate(std::span<const double> c_grid, const Matrix& x, std::span<const int> labels,
                                int folds, std::uint64_t seed, const LogisticOptions& options = {});

}  // namespace allocbench
