#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "allocbench/matrix.hpp"

namespace allocbench {

struct LogisticOptions {
    double gradient_tolerance = 1e-6;
    int max_iterations = 1000;
};

/// L2-regularized logistic regression; the intercept is unpenalized.
class LogisticModel {
public:
    LogisticModel() = default;
    LogisticModel(std::vector<double> weights, double intercept, double c, int iterations = 0,
                  double gradient_norm = 0.0);

    const std::vector<double>& weights() const noexcept { return weights_; }
    double intercept() const noexcept { return intercept_; }
    double inverse_regularization() const noexcept { return c_; }
    int iterations() const noexcept { return iterations_; }
    double gradient_norm() const noexcept { return gradient_norm_; }

    double probability(std::span<const double> x) const;
    std::vector<double> probability(const Matrix& x) const;

    friend bool operator==(const LogisticModel& a, const LogisticModel& b) {
        return a.weights_ == b.weights_ && a.intercept_ == b.intercept_ && a.c_ == b.c_;
    }

private:
    std::vector<double> weights_;
    double intercept_ = 0.0;
    double c_ = 1.0;
    int iterations_ = 0;
    double gradient_norm_ = 0.0;
};

/// Penalized objective (1/C) * 0.5 * |w|^2 + sum_i logloss_i at (w, b).
double logistic_objective(const Matrix& x, std::span<const int> labels, double c,
                          std::span<const double> weights, double intercept);

/// Analytic gradient of logistic_objective; the last entry is d/d intercept.
std::vector<double> logistic_gradient(const Matrix& x, std::span<const int> labels, double c,
                                      std::span<const double> weights, double intercept);

/// Damped Newton iterations until the gradient norm drops to the tolerance.
/// Throws DegenerateLabelsError if only one class is present.
LogisticModel fit_logistic(const Matrix& x, std::span<const int> labels, double c,
                           const LogisticOptions& options = {});

}  // namespace allocbench
