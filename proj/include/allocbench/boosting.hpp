#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "allocbench/matrix.hpp"
#include "allocbench/tree.hpp"

namespace allocbench {

struct BoostingParams {
    double learning_rate = 0.1;
    int max_depth = 3;
    int n_estimators = 100;

    friend bool operator==(const BoostingParams&, const BoostingParams&) = default;
};

/// Throws std::invalid_argument unless 0 < learning_rate <= 1,
/// max_depth >= 1 and n_estimators >= 0.
void validate(const BoostingParams& params);

/// The hyperparameter grid searched for every outcome and pseudo-outcome
/// regression: learning_rate {0.1, 0.3} x max_depth {3, 5, 8} x
/// n_estimators {30, 100}, in that nesting order.
std::vector<BoostingParams> default_boosting_grid();

/// Squared-loss gradient boosting: F_0 = mean(y), F_t = F_{t-1} +
/// learning_rate * tree_t where tree_t is fit to the residuals y - F_{t-1}.
class GradientBoostedModel {
public:
    GradientBoostedModel() = default;
    GradientBoostedModel(double init, BoostingParams params, std::vector<RegressionTree> trees);

    double init() const noexcept { return init_; }
    const BoostingParams& params() const noexcept { return params_; }
    const std::vector<RegressionTree>& trees() const noexcept { return trees_; }

    /// Prediction using only the first `stages` trees.
    double predict(std::span<const double> x, std::size_t stages) const;
    double predict(std::span<const double> x) const { return predict(x, trees_.size()); }
    std::vector<double> predict(const Matrix& x) const;

    friend bool operator==(const GradientBoostedModel&, const GradientBoostedModel&) = default;

private:
    double init_ = 0.0;
    BoostingParams params_;
    std::vector<RegressionTree> trees_;
};

/// Trees use the library defaults min_samples_split = 2, min_samples_leaf = 1,
/// all features and all rows; the fit is deterministic and `seed` is kept for
/// interface symmetry with the other learners.
GradientBoostedModel fit_gradient_boosting(const Matrix& x, std::span<const double> y,
                                           const BoostingParams& params, std::uint64_t seed = 0);

/// Same fit on a prepared sample (positions index `y`).
GradientBoostedModel fit_gradient_boosting(const PresortedSample& sample, const Matrix& x,
                                           std::span<const double> y, const BoostingParams& params);

}  // namespace allocbench
