#include "allocbench/xlearner.hpp"

#include <algorithm>
#include <stdexcept>

#include "allocbench/cross_validation.hpp"
#include "allocbench/dgp.hpp"
#include "allocbench/errors.hpp"
#include "allocbench/random.hpp"

namespace allocbench {
namespace {

GradientBoostedModel fit_tuned_boosting(const Matrix& x, std::span<const double> y, const XLearnerConfig& config,
                                        std::uint64_t seed) {
    const auto cv = cross_validate(config.boosting_grid, x, y, config.folds, seed, config.threads);
    return fit_gradient_boosting(x, y, cv.best);
}

}  // namespace

XLearnerModel fit_xlearner(const Matrix& x, std::span<const int> treatment, std::span<const double> outcome,
                           const XLearnerConfig& config, std::uint64_t seed) {
    if (treatment.size() != x.rows() || outcome.size() != x.rows())
        throw std::invalid_argument("fit_xlearner: treatment/outcome length mismatch");
    if (!(config.propensity_clip >= 0.0 && config.propensity_clip < 0.5))
        throw std::invalid_argument("fit_xlearner: propensity_clip must be in [0, 0.5)");

    std::vector<std::size_t> treated;
    std::vector<std::size_t> control;
    for (std::size_t i = 0; i < treatment.size(); ++i) {
        if (treatment[i] == 1) treated.push_back(i);
        else if (treatment[i] == 0) control.push_back(i);
        else throw std::invalid_argument("fit_xlearner: treatment must be 0 or 1");
    }
    const auto folds = static_cast<std::size_t>(std::max(config.folds, 0));
    if (control.size() < folds) throw InsufficientArmError("control", control.size(), folds);
    if (treated.size() < folds) throw InsufficientArmError("treated", treated.size(), folds);

    const Matrix x0 = x.select_rows(control);
    const Matrix x1 = x.select_rows(treated);
    std::vector<double> y0;
    std::vector<double> y1;
    for (std::size_t i : control) y0.push_back(outcome[i]);
    for (std::size_t i : treated) y1.push_back(outcome[i]);

    XLearnerModel model;
    model.n_features = x.cols();
    model.propensity_clip = config.propensity_clip;
    model.mu0 = fit_tuned_boosting(x0, y0, config, derive_seed(seed, {seed_tag("mu0")}));
    model.mu1 = fit_tuned_boosting(x1, y1, config, derive_seed(seed, {seed_tag("mu1")}));

    // Imputed effects: treated units against the control model and vice versa.
    std::vector<double> d1(treated.size());
    std::vector<double> d0(control.size());
    for (std::size_t i = 0; i < treated.size(); ++i) d1[i] = y1[i] - model.mu0.predict(x1.row(i));
    for (std::size_t i = 0; i < control.size(); ++i) d0[i] = model.mu1.predict(x0.row(i)) - y0[i];
    model.tau1 = fit_tuned_boosting(x1, d1, config, derive_seed(seed, {seed_tag("tau1")}));
    model.tau0 = fit_tuned_boosting(x0, d0, config, derive_seed(seed, {seed_tag("tau0")}));

    const auto cv = cross_validate(config.logistic_grid, x, treatment, config.folds,
                                   derive_seed(seed, {seed_tag("propensity")}));
    model.g = fit_logistic(x, treatment, cv.best);
    return model;
}

XLearnerModel fit_xlearner(const PopulationSample& sample, const XLearnerConfig& config, std::uint64_t seed) {
    return fit_xlearner(sample.x.values, sample.treatment, sample.y, config, seed);
}

CateComponents predict_cate_components(const XLearnerModel& model, const Matrix& x) {
    if (x.cols() != model.n_features)
        throw std::invalid_argument("predict_cate: expected " + std::to_string(model.n_features) + " columns, got " +
                                    std::to_string(x.cols()));
    const double clip = model.propensity_clip;
    CateComponents out;
    out.tau0 = model.tau0.predict(x);
    out.tau1 = model.tau1.predict(x);
    out.propensity = model.g.probability(x);
    out.cate.resize(x.rows());
    for (std::size_t i = 0; i < x.rows(); ++i) {
        out.propensity[i] = std::clamp(out.propensity[i], clip, 1.0 - clip);
        out.cate[i] = combine_cate(out.propensity[i], out.tau0[i], out.tau1[i]);
    }
    return out;
}

std::vector<double> predict_cate(const XLearnerModel& model, const Matrix& x) {
    return predict_cate_components(model, x).cate;
}

}  // namespace allocbench
