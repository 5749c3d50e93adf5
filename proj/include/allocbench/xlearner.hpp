#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "allocbench/boosting.hpp"
#include "allocbench/logistic.hpp"
#include "allocbench/matrix.hpp"

namespace allocbench {

struct PopulationSample;

struct XLearnerConfig {
    std::vector<BoostingParams> boosting_grid = default_boosting_grid();
    std::vector<double> logistic_grid = {0.1, 1.0, 10.0, 100.0};
    int folds = 5;
    double propensity_clip = 0.01;  ///< g is clipped to [clip, 1 - clip]
    int threads = 1;                ///< workers for cross-validation
};

/// The five fitted submodels of an X-learner.
struct XLearnerModel {
    std::size_t n_features = 0;
    double propensity_clip = 0.01;
    GradientBoostedModel mu0;   ///< E[Y | X, T = 0], fit on controls
    GradientBoostedModel mu1;   ///< E[Y | X, T = 1], fit on treated
    GradientBoostedModel tau0;  ///< fit on controls to mu1(X) - Y
    GradientBoostedModel tau1;  ///< fit on treated to Y - mu0(X)
    LogisticModel g;            ///< P(T = 1 | X)

    friend bool operator==(const XLearnerModel&, const XLearnerModel&) = default;
};

/// Fits the X-learner. Each boosted submodel and the propensity model pick
/// their hyperparameters by their own cross-validation, then refit on all
/// rows of their role. Throws InsufficientArmError when an arm has fewer than
/// `config.folds` units.
XLearnerModel fit_xlearner(const Matrix& x, std::span<const int> treatment, std::span<const double> outcome,
                           const XLearnerConfig& config, std::uint64_t seed);

XLearnerModel fit_xlearner(const PopulationSample& sample, const XLearnerConfig& config, std::uint64_t seed);

/// g * tau0 + (1 - g) * tau1 for an already clipped propensity g.
inline double combine_cate(double g, double tau0, double tau1) noexcept { return g * tau0 + (1.0 - g) * tau1; }

struct CateComponents {
    std::vector<double> tau0;
    std::vector<double> tau1;
    std::vector<double> propensity;  ///< clipped
    std::vector<double> cate;
};

CateComponents predict_cate_components(const XLearnerModel& model, const Matrix& x);
std::vector<double> predict_cate(const XLearnerModel& model, const Matrix& x);

/// Text serialization: a version line followed by keyed sections for each
/// submodel. Floating-point values are written in hexadecimal so a loaded
/// model predicts bit-identically.
void save_model(std::ostream& out, const XLearnerModel& model);
XLearnerModel load_model(std::istream& in);

}  // namespace allocbench
