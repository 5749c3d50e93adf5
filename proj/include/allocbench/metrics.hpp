#pragma once

#include <span>
#include <vector>

namespace allocbench {

/// Root mean squared error between estimated and true effects.
double pehe(std::span<const double> tau_hat, std::span<const double> tau_true);

/// Area under the ROC curve via the rank-sum statistic; tied scores share
/// their average rank. Labels are 0/1 and both classes must be present.
double roc_auc(std::span<const double> scores, std::span<const int> labels);

/// Ranks 1..n with ties given their average rank.
std::vector<double> average_ranks(std::span<const double> values);

double spearman_correlation(std::span<const double> a, std::span<const double> b);

}  // namespace allocbench
