#include "allocbench/boosting.hpp"

#include <numeric>
#include <stdexcept>

namespace allocbench {

void validate(const BoostingParams& params) {
    if (!(params.learning_rate > 0.0 && params.learning_rate <= 1.0))
        throw std::invalid_argument("boosting: learning_rate must be in (0, 1]");
    if (params.max_depth < 1) throw std::invalid_argument("boosting: max_depth must be >= 1");
    if (params.n_estimators < 0) throw std::invalid_argument("boosting: n_estimators must be >= 0");
}

std::vector<BoostingParams> default_boosting_grid() {
    std::vector<BoostingParams> grid;
    for (double lr : {0.1, 0.3})
        for (int depth : {3, 5, 8})
            for (int n : {30, 100}) grid.push_back({lr, depth, n});
    return grid;
}

GradientBoostedModel::GradientBoostedModel(double init, BoostingParams params, std::vector<RegressionTree> trees)
    : init_(init), params_(params), trees_(std::move(trees)) {}

double GradientBoostedModel::predict(std::span<const double> x, std::size_t stages) const {
    double f = init_;
    const std::size_t used = std::min(stages, trees_.size());
    for (std::size_t t = 0; t < used; ++t) f += params_.learning_rate * trees_[t].predict(x);
    return f;
}

std::vector<double> GradientBoostedModel::predict(const Matrix& x) const {
    std::vector<double> out(x.rows());
    for (std::size_t i = 0; i < x.rows(); ++i) out[i] = predict(x.row(i));
    return out;
}

GradientBoostedModel fit_gradient_boosting(const PresortedSample& sample, const Matrix& x,
                                           std::span<const double> y, const BoostingParams& params) {
    validate(params);
    if (y.empty()) throw std::invalid_argument("boosting: empty input");
    if (y.size() != x.rows() || sample.size() != x.rows())
        throw std::invalid_argument("boosting: sample, matrix and target sizes differ");

    const double init = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(y.size());
    std::vector<double> fitted(y.size(), init);
    std::vector<double> residual(y.size());
    TreeParams tree_params;
    tree_params.max_depth = params.max_depth;

    std::vector<RegressionTree> trees;
    trees.reserve(static_cast<std::size_t>(params.n_estimators));
    for (int t = 0; t < params.n_estimators; ++t) {
        for (std::size_t i = 0; i < y.size(); ++i) residual[i] = y[i] - fitted[i];
        trees.push_back(sample.fit(residual, tree_params));
        const auto& tree = trees.back();
        for (std::size_t i = 0; i < y.size(); ++i) fitted[i] += params.learning_rate * tree.predict(x.row(i));
    }
    return GradientBoostedModel(init, params, std::move(trees));
}

GradientBoostedModel fit_gradient_boosting(const Matrix& x, std::span<const double> y,
                                           const BoostingParams& params, std::uint64_t /*seed*/) {
    validate(params);
    if (x.rows() == 0) throw std::invalid_argument("boosting: empty input");
    return fit_gradient_boosting(PresortedSample(x), x, y, params);
}

}  // namespace allocbench
