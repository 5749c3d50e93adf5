#include "allocbench/tree.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace allocbench {

RegressionTree::RegressionTree(std::vector<TreeNode> nodes) : nodes_(std::move(nodes)) {
    if (nodes_.empty()) throw std::invalid_argument("RegressionTree: empty node list");
    // Every non-root node must be referenced exactly once, by an earlier node.
    std::vector<int> parents(nodes_.size(), 0);
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        const auto& node = nodes_[i];
        if (node.is_leaf()) continue;
        for (auto child : {node.left, node.right}) {
            if (child <= static_cast<std::int32_t>(i) || child >= static_cast<std::int32_t>(nodes_.size()))
                throw std::invalid_argument("RegressionTree: bad child index at node " + std::to_string(i));
            ++parents[static_cast<std::size_t>(child)];
        }
    }
    for (std::size_t i = 1; i < nodes_.size(); ++i)
        if (parents[i] != 1) throw std::invalid_argument("RegressionTree: node " + std::to_string(i) + " unreachable");
}

double RegressionTree::predict(std::span<const double> x) const {
    const TreeNode* node = &nodes_.front();
    while (!node->is_leaf())
        node = &nodes_[static_cast<std::size_t>(x[static_cast<std::size_t>(node->feature)] <= node->threshold
                                                     ? node->left
                                                     : node->right)];
    return node->value;
}

std::vector<double> RegressionTree::predict(const Matrix& x) const {
    std::vector<double> out(x.rows());
    for (std::size_t i = 0; i < x.rows(); ++i) out[i] = predict(x.row(i));
    return out;
}

std::size_t RegressionTree::leaf_count() const {
    return static_cast<std::size_t>(
        std::count_if(nodes_.begin(), nodes_.end(), [](const TreeNode& n) { return n.is_leaf(); }));
}

int RegressionTree::depth() const {
    std::vector<int> depth(nodes_.size(), 0);
    int deepest = 0;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        deepest = std::max(deepest, depth[i]);
        if (!nodes_[i].is_leaf()) {
            depth[static_cast<std::size_t>(nodes_[i].left)] = depth[i] + 1;
            depth[static_cast<std::size_t>(nodes_[i].right)] = depth[i] + 1;
        }
    }
    return deepest;
}

PresortedSample::PresortedSample(const Matrix& x) {
    std::vector<std::size_t> rows(x.rows());
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    *this = PresortedSample(x, rows);
}

PresortedSample::PresortedSample(const Matrix& x, std::span<const std::size_t> rows)
    : n_(rows.size()), d_(x.cols()), columns_(n_ * d_), order_(n_ * d_) {
    if (n_ > std::numeric_limits<std::uint32_t>::max())
        throw std::invalid_argument("PresortedSample: too many rows");
    for (std::size_t f = 0; f < d_; ++f) {
        double* col = columns_.data() + f * n_;
        for (std::size_t p = 0; p < n_; ++p) col[p] = x(rows[p], f);
        auto* ord = order_.data() + f * n_;
        std::iota(ord, ord + n_, std::uint32_t{0});
        std::stable_sort(ord, ord + n_, [col](std::uint32_t a, std::uint32_t b) { return col[a] < col[b]; });
    }
}

namespace {

struct PendingNode {
    std::size_t node;
    std::size_t begin;
    std::size_t end;
    int depth;
};

}  // namespace

RegressionTree PresortedSample::fit(std::span<const double> y, const TreeParams& params, Rng* rng) const {
    if (n_ == 0) throw std::invalid_argument("fit_regression_tree: empty input");
    if (y.size() != n_) throw std::invalid_argument("fit_regression_tree: target length mismatch");
    if (params.min_samples_leaf < 1 || params.min_samples_split < 2)
        throw std::invalid_argument("fit_regression_tree: min_samples_leaf >= 1 and min_samples_split >= 2 required");
    if (params.max_depth && *params.max_depth < 0)
        throw std::invalid_argument("fit_regression_tree: max_depth must be >= 0");

    std::size_t tried = d_;
    if (params.max_features) {
        if (*params.max_features < 1) throw std::invalid_argument("fit_regression_tree: max_features must be >= 1");
        tried = std::min(d_, static_cast<std::size_t>(*params.max_features));
        if (tried < d_ && rng == nullptr)
            throw std::invalid_argument("fit_regression_tree: feature subsampling needs a generator");
    }
    const std::size_t min_leaf = static_cast<std::size_t>(params.min_samples_leaf);
    const std::size_t min_split = static_cast<std::size_t>(params.min_samples_split);

    std::vector<std::uint32_t> work = order_;
    std::vector<std::uint32_t> scratch(n_);
    std::vector<char> goes_left(n_);
    std::vector<std::size_t> feature_pool(d_);
    std::iota(feature_pool.begin(), feature_pool.end(), std::size_t{0});
    std::vector<std::size_t> candidates = feature_pool;

    std::vector<TreeNode> nodes(1);
    std::vector<PendingNode> stack{{0, 0, n_, 0}};
    while (!stack.empty()) {
        const PendingNode cur = stack.back();
        stack.pop_back();
        const std::size_t count = cur.end - cur.begin;
        // Any feature's segment holds the node's positions; use feature 0.
        const std::uint32_t* seg = work.data() + cur.begin;

        double total = 0.0;
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        for (std::size_t i = 0; i < count; ++i) {
            const double v = y[seg[i]];
            total += v;
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        nodes[cur.node].value = total / static_cast<double>(count);

        const bool depth_ok = !params.max_depth || cur.depth < *params.max_depth;
        if (!depth_ok || count < min_split || count < 2 * min_leaf || lo == hi) continue;

        if (tried < d_) {
            std::shuffle(feature_pool.begin(), feature_pool.end(), *rng);
            candidates.assign(feature_pool.begin(), feature_pool.begin() + static_cast<std::ptrdiff_t>(tried));
            std::sort(candidates.begin(), candidates.end());
        }

        double best_score = -std::numeric_limits<double>::infinity();
        std::size_t best_feature = d_;
        std::size_t best_left = 0;
        double best_threshold = 0.0;
        for (std::size_t f : candidates) {
            const std::uint32_t* ord = work.data() + f * n_ + cur.begin;
            const double* col = columns_.data() + f * n_;
            double left_sum = 0.0;
            for (std::size_t i = 0; i + 1 < count; ++i) {
                left_sum += y[ord[i]];
                const double v = col[ord[i]];
                const double next = col[ord[i + 1]];
                if (!(v < next)) continue;
                const std::size_t nl = i + 1;
                const std::size_t nr = count - nl;
                if (nl < min_leaf || nr < min_leaf) continue;
                const double right_sum = total - left_sum;
                const double score = left_sum * left_sum / static_cast<double>(nl) +
                                     right_sum * right_sum / static_cast<double>(nr);
                if (score > best_score) {
                    best_score = score;
                    best_feature = f;
                    best_left = nl;
                    double mid = v + (next - v) * 0.5;
                    if (!(mid < next)) mid = v;
                    best_threshold = mid;
                }
            }
        }
        if (best_feature == d_) continue;

        const std::uint32_t* best_ord = work.data() + best_feature * n_ + cur.begin;
        for (std::size_t i = 0; i < count; ++i) goes_left[best_ord[i]] = i < best_left ? 1 : 0;
        for (std::size_t f = 0; f < d_; ++f) {
            if (f == best_feature) continue;
            std::uint32_t* ord = work.data() + f * n_ + cur.begin;
            std::size_t l = 0;
            std::size_t r = best_left;
            for (std::size_t i = 0; i < count; ++i) {
                if (goes_left[ord[i]]) scratch[l++] = ord[i];
                else scratch[r++] = ord[i];
            }
            std::copy_n(scratch.begin(), count, ord);
        }

        const auto left = static_cast<std::int32_t>(nodes.size());
        nodes[cur.node].feature = static_cast<int>(best_feature);
        nodes[cur.node].threshold = best_threshold;
        nodes[cur.node].left = left;
        nodes[cur.node].right = left + 1;
        nodes.resize(nodes.size() + 2);
        stack.push_back({static_cast<std::size_t>(left + 1), cur.begin + best_left, cur.end, cur.depth + 1});
        stack.push_back({static_cast<std::size_t>(left), cur.begin, cur.begin + best_left, cur.depth + 1});
    }
    return RegressionTree(std::move(nodes));
}

RegressionTree fit_regression_tree(const Matrix& x, std::span<const double> y, const TreeParams& params,
                                   std::uint64_t seed) {
    if (x.rows() == 0) throw std::invalid_argument("fit_regression_tree: empty input");
    if (y.size() != x.rows()) throw std::invalid_argument("fit_regression_tree: target length mismatch");
    Rng rng(seed);
    return PresortedSample(x).fit(y, params, &rng);
}

}  // namespace allocbench
