#pragma once

// Covariate shift induction: a random-forest domain classifier separates the
// training cohort (label 0) from the target cohort (label 1); its
// probabilities become resampling weights logit(p)^q.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "allocbench/dgp.hpp"
#include "allocbench/matrix.hpp"
#include "allocbench/tree.hpp"

namespace allocbench {

struct ForestParams {
    int n_trees = 100;
    int max_depth = 8;
    std::optional<int> max_features;  ///< default ceil(sqrt(d))
    double p_min = 1e-3;              ///< probabilities clipped to [p_min, 1 - p_min]
    int threads = 1;
};

/// Bagged depth-limited trees on 0/1 domain labels; the probability of the
/// target domain is the mean of per-tree leaf label fractions.
class DomainClassifier {
public:
    DomainClassifier(std::vector<RegressionTree> trees, double p_min, std::size_t n_source,
                     std::size_t n_target, std::uint64_t seed);

    double probability(std::span<const double> x) const;
    std::vector<double> probability(const Matrix& x) const;

    std::size_t n_source() const noexcept { return n_source_; }
    std::size_t n_target() const noexcept { return n_target_; }
    std::uint64_t seed() const noexcept { return seed_; }
    std::size_t n_trees() const noexcept { return trees_.size(); }

private:
    std::vector<RegressionTree> trees_;
    double p_min_;
    std::size_t n_source_;
    std::size_t n_target_;
    std::uint64_t seed_;
};

/// Each tree sees a bootstrap sample of the pooled rows and tries
/// max_features random features per split. Needs >= 10 rows per domain.
DomainClassifier fit_domain_classifier(const Matrix& source, const Matrix& target, const ForestParams& params,
                                       std::uint64_t seed);

struct ShiftWeights {
    std::vector<double> raw;
    std::vector<double> normalized;
    int q = 6;
};

/// raw_i = logit(p_i)^q (or max(logit, 0)^q when `signed_weights`), then
/// normalized to sum to one. Throws AllZeroWeightsError if every raw weight is
/// zero.
ShiftWeights shift_weights(std::span<const double> probabilities, int q, bool signed_weights = false);

/// Row indices drawn with replacement with probabilities `normalized`.
std::vector<std::size_t> draw_weighted_indices(std::span<const double> normalized, std::size_t m,
                                               std::uint64_t seed);

/// m rows of `source` drawn with replacement according to the weights; all
/// per-unit fields travel with their row.
PopulationSample resample_shifted(const PopulationSample& source, const ShiftWeights& weights, std::size_t m,
                                  std::uint64_t seed);

/// Fits a fresh domain classifier on a seeded half of each cohort and returns
/// its ROC AUC on the held-out halves (label 1 = `b`).
double holdout_domain_auc(const Matrix& a, const Matrix& b, const ForestParams& params, std::uint64_t seed);

/// CSV with header unit_id,sigma,raw_weight,normalized_weight.
void write_shift_diagnostics_csv(std::ostream& out, std::span<const double> sigma, const ShiftWeights& weights);

}  // namespace allocbench
