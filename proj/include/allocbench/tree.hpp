#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "allocbench/matrix.hpp"
#include "allocbench/random.hpp"

namespace allocbench {

struct TreeParams {
    std::optional<int> max_depth = 3;  ///< nullopt grows until leaves are pure
    int min_samples_split = 2;
    int min_samples_leaf = 1;
    std::optional<int> max_features;  ///< features tried per split; nullopt = all
};

struct TreeNode {
    int feature = -1;  ///< -1 marks a leaf
    double threshold = 0.0;
    std::int32_t left = -1;
    std::int32_t right = -1;
    double value = 0.0;

    bool is_leaf() const noexcept { return feature < 0; }
    friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

/// Binary tree of axis-aligned splits; x[feature] <= threshold goes left.
class RegressionTree {
public:
    RegressionTree() = default;
    /// Throws std::invalid_argument if the node array is not a well-formed
    /// tree rooted at index 0.
    explicit RegressionTree(std::vector<TreeNode> nodes);

    double predict(std::span<const double> x) const;
    std::vector<double> predict(const Matrix& x) const;

    const std::vector<TreeNode>& nodes() const noexcept { return nodes_; }
    std::size_t leaf_count() const;
    int depth() const;

    friend bool operator==(const RegressionTree&, const RegressionTree&) = default;

private:
    std::vector<TreeNode> nodes_;
};

/// A row subset copied column-major with every feature presorted once, so
/// repeated fits on the same rows (boosting stages) skip the sort.
///
/// Positions 0..size()-1 refer to the rows passed at construction, in order;
/// rows may repeat (bootstrap samples).
class PresortedSample {
public:
    explicit PresortedSample(const Matrix& x);
    PresortedSample(const Matrix& x, std::span<const std::size_t> rows);

    std::size_t size() const noexcept { return n_; }
    std::size_t features() const noexcept { return d_; }

    /// Greedy CART with squared-error impurity. Candidate thresholds are
    /// midpoints between consecutive distinct sorted values; among equal
    /// scores the lowest feature index and then the lowest threshold win.
    /// `y` is indexed by position. `rng` is only needed with max_features.
    RegressionTree fit(std::span<const double> y, const TreeParams& params, Rng* rng = nullptr) const;

private:
    std::size_t n_ = 0;
    std::size_t d_ = 0;
    std::vector<double> columns_;       // d_ x n_
    std::vector<std::uint32_t> order_;  // d_ x n_, positions sorted by value
};

RegressionTree fit_regression_tree(const Matrix& x, std::span<const double> y,
                                   const TreeParams& params, std::uint64_t seed = 0);

}  // namespace allocbench
