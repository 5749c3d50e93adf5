#include "allocbench/logistic.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

#include "allocbench/errors.hpp"

namespace allocbench {
namespace {

double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

// log(1 + exp(z)) without overflow.
double softplus(double z) { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

double linear_index(std::span<const double> x, std::span<const double> w, double b) {
    double z = b;
    for (std::size_t j = 0; j < w.size(); ++j) z += w[j] * x[j];
    return z;
}

void check_inputs(const Matrix& x, std::span<const int> labels, double c) {
    if (labels.size() != x.rows()) throw std::invalid_argument("logistic: label length mismatch");
    if (!(c > 0.0)) throw std::invalid_argument("logistic: C must be > 0");
    for (int t : labels)
        if (t != 0 && t != 1) throw std::invalid_argument("logistic: labels must be 0 or 1");
}

}  // namespace

LogisticModel::LogisticModel(std::vector<double> weights, double intercept, double c, int iterations,
                             double gradient_norm)
    : weights_(std::move(weights)), intercept_(intercept), c_(c), iterations_(iterations),
      gradient_norm_(gradient_norm) {}

double LogisticModel::probability(std::span<const double> x) const {
    return sigmoid(linear_index(x, weights_, intercept_));
}

std::vector<double> LogisticModel::probability(const Matrix& x) const {
    if (x.cols() != weights_.size()) throw std::invalid_argument("logistic: column count mismatch");
    std::vector<double> out(x.rows());
    for (std::size_t i = 0; i < x.rows(); ++i) out[i] = probability(x.row(i));
    return out;
}

double logistic_objective(const Matrix& x, std::span<const int> labels, double c,
                          std::span<const double> weights, double intercept) {
    check_inputs(x, labels, c);
    double penalty = 0.0;
    for (double w : weights) penalty += w * w;
    double loss = 0.0;
    for (std::size_t i = 0; i < x.rows(); ++i) {
        const double z = linear_index(x.row(i), weights, intercept);
        loss += softplus(z) - labels[i] * z;
    }
    return 0.5 * penalty / c + loss;
}

std::vector<double> logistic_gradient(const Matrix& x, std::span<const int> labels, double c,
                                      std::span<const double> weights, double intercept) {
    check_inputs(x, labels, c);
    const std::size_t d = weights.size();
    std::vector<double> g(d + 1, 0.0);
    for (std::size_t i = 0; i < x.rows(); ++i) {
        const auto row = x.row(i);
        const double r = sigmoid(linear_index(row, weights, intercept)) - labels[i];
        for (std::size_t j = 0; j < d; ++j) g[j] += r * row[j];
        g[d] += r;
    }
    for (std::size_t j = 0; j < d; ++j) g[j] += weights[j] / c;
    return g;
}

LogisticModel fit_logistic(const Matrix& x, std::span<const int> labels, double c, const LogisticOptions& options) {
    check_inputs(x, labels, c);
    std::size_t positives = 0;
    for (int t : labels) positives += static_cast<std::size_t>(t);
    if (positives == 0 || positives == labels.size())
        throw DegenerateLabelsError("logistic: both classes must be present");

    const std::size_t n = x.rows();
    const std::size_t d = x.cols();
    const auto p = static_cast<Eigen::Index>(d + 1);
    Eigen::MatrixXd design(static_cast<Eigen::Index>(n), p);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < d; ++j) design(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = x(i, j);
        design(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(d)) = 1.0;
    }
    Eigen::VectorXd t(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) t(static_cast<Eigen::Index>(i)) = labels[i];
    Eigen::VectorXd penalty = Eigen::VectorXd::Constant(p, 1.0 / c);
    penalty(p - 1) = 0.0;

    auto objective = [&](const Eigen::VectorXd& theta) {
        const Eigen::VectorXd z = design * theta;
        double loss = 0.0;
        for (Eigen::Index i = 0; i < z.size(); ++i) loss += softplus(z(i)) - t(i) * z(i);
        return 0.5 * theta.head(p - 1).squaredNorm() / c + loss;
    };

    Eigen::VectorXd theta = Eigen::VectorXd::Zero(p);
    double value = objective(theta);
    double grad_norm = 0.0;
    int iteration = 0;
    for (; iteration < options.max_iterations; ++iteration) {
        const Eigen::VectorXd z = design * theta;
        Eigen::VectorXd prob(z.size());
        Eigen::VectorXd curvature(z.size());
        for (Eigen::Index i = 0; i < z.size(); ++i) {
            prob(i) = sigmoid(z(i));
            curvature(i) = prob(i) * (1.0 - prob(i));
        }
        const Eigen::VectorXd gradient = design.transpose() * (prob - t) + penalty.cwiseProduct(theta);
        grad_norm = gradient.norm();
        if (grad_norm <= options.gradient_tolerance) break;

        Eigen::MatrixXd hessian = design.transpose() * curvature.asDiagonal() * design;
        hessian.diagonal() += penalty;
        // Tiny ridge keeps the intercept direction solvable when curvature underflows.
        hessian.diagonal().array() += 1e-12;
        const Eigen::VectorXd step = hessian.ldlt().solve(-gradient);

        double scale = 1.0;
        const double slope = gradient.dot(step);
        Eigen::VectorXd candidate = theta + step;
        double candidate_value = objective(candidate);
        while (candidate_value > value + 1e-4 * scale * slope && scale > 1e-10) {
            scale *= 0.5;
            candidate = theta + scale * step;
            candidate_value = objective(candidate);
        }
        if (!(candidate_value <= value)) break;  // no further progress possible in floating point
        theta = candidate;
        value = candidate_value;
    }

    std::vector<double> weights(theta.data(), theta.data() + d);
    return LogisticModel(std::move(weights), theta(p - 1), c, iteration, grad_norm);
}

}  // namespace allocbench
