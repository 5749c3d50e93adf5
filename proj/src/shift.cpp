#include "allocbench/shift.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "allocbench/csv_io.hpp"
#include "allocbench/errors.hpp"
#include "allocbench/metrics.hpp"
#include "allocbench/parallel.hpp"
#include "allocbench/random.hpp"

namespace allocbench {

DomainClassifier::DomainClassifier(std::vector<RegressionTree> trees, double p_min, std::size_t n_source,
                                   std::size_t n_target, std::uint64_t seed)
    : trees_(std::move(trees)), p_min_(p_min), n_source_(n_source), n_target_(n_target), seed_(seed) {}

double DomainClassifier::probability(std::span<const double> x) const {
    double votes = 0.0;
    for (const auto& tree : trees_) votes += tree.predict(x);
    const double p = votes / static_cast<double>(trees_.size());
    return std::clamp(p, p_min_, 1.0 - p_min_);
}

std::vector<double> DomainClassifier::probability(const Matrix& x) const {
    std::vector<double> out(x.rows());
    for (std::size_t i = 0; i < x.rows(); ++i) out[i] = probability(x.row(i));
    return out;
}

DomainClassifier fit_domain_classifier(const Matrix& source, const Matrix& target, const ForestParams& params,
                                       std::uint64_t seed) {
    if (source.cols() != target.cols())
        throw std::invalid_argument("fit_domain_classifier: source has " + std::to_string(source.cols()) +
                                    " columns, target has " + std::to_string(target.cols()));
    if (source.rows() < 10 || target.rows() < 10)
        throw std::invalid_argument("fit_domain_classifier: each domain needs at least 10 rows");
    if (params.n_trees < 1 || params.max_depth < 1)
        throw std::invalid_argument("fit_domain_classifier: n_trees and max_depth must be >= 1");
    if (!(params.p_min > 0.0 && params.p_min < 0.5))
        throw std::invalid_argument("fit_domain_classifier: p_min must be in (0, 0.5)");

    const Matrix pooled = Matrix::vstack(source, target);
    const std::size_t n = pooled.rows();
    std::vector<double> labels(n, 0.0);
    std::fill(labels.begin() + static_cast<std::ptrdiff_t>(source.rows()), labels.end(), 1.0);

    TreeParams tree_params;
    tree_params.max_depth = params.max_depth;
    tree_params.max_features =
        params.max_features.value_or(static_cast<int>(std::ceil(std::sqrt(static_cast<double>(pooled.cols())))));

    std::vector<RegressionTree> trees(static_cast<std::size_t>(params.n_trees));
    parallel_for(trees.size(), params.threads, [&](std::size_t t) {
        Rng rng(derive_seed(seed, {seed_tag("tree"), t}));
        std::uniform_int_distribution<std::size_t> pick(0, n - 1);
        std::vector<std::size_t> rows(n);
        for (auto& r : rows) r = pick(rng);
        std::vector<double> y(n);
        for (std::size_t p = 0; p < n; ++p) y[p] = labels[rows[p]];
        trees[t] = PresortedSample(pooled, rows).fit(y, tree_params, &rng);
    });
    return DomainClassifier(std::move(trees), params.p_min, source.rows(), target.rows(), seed);
}

ShiftWeights shift_weights(std::span<const double> probabilities, int q, bool signed_weights) {
    if (q < 1) throw std::invalid_argument("shift_weights: q must be >= 1");
    ShiftWeights w;
    w.q = q;
    w.raw.resize(probabilities.size());
    for (std::size_t i = 0; i < probabilities.size(); ++i) {
        const double p = probabilities[i];
        if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("shift_weights: probabilities must lie in (0, 1)");
        double logit = std::log(p / (1.0 - p));
        if (signed_weights) logit = std::max(logit, 0.0);
        w.raw[i] = std::pow(logit, q);
    }
    const double total = std::accumulate(w.raw.begin(), w.raw.end(), 0.0);
    if (!(total != 0.0)) throw AllZeroWeightsError("shift_weights: all raw weights are zero");
    w.normalized.resize(w.raw.size());
    for (std::size_t i = 0; i < w.raw.size(); ++i) w.normalized[i] = w.raw[i] / total;
    return w;
}

std::vector<std::size_t> draw_weighted_indices(std::span<const double> normalized, std::size_t m,
                                               std::uint64_t seed) {
    if (normalized.empty()) throw std::invalid_argument("draw_weighted_indices: empty weights");
    for (double w : normalized)
        if (!(w >= 0.0)) throw std::invalid_argument("draw_weighted_indices: negative weight");
    Rng rng(seed);
    std::discrete_distribution<std::size_t> pick(normalized.begin(), normalized.end());
    std::vector<std::size_t> out(m);
    for (auto& i : out) i = pick(rng);
    return out;
}

PopulationSample resample_shifted(const PopulationSample& source, const ShiftWeights& weights, std::size_t m,
                                  std::uint64_t seed) {
    if (weights.normalized.size() != source.size())
        throw std::invalid_argument("resample_shifted: " + std::to_string(weights.normalized.size()) +
                                    " weights for " + std::to_string(source.size()) + " units");
    if (m == 0) throw std::invalid_argument("resample_shifted: m must be >= 1");
    return source.select_rows(draw_weighted_indices(weights.normalized, m, seed));
}

double holdout_domain_auc(const Matrix& a, const Matrix& b, const ForestParams& params, std::uint64_t seed) {
    auto halves = [&](const Matrix& m, std::uint64_t tag) {
        std::vector<std::size_t> idx(m.rows());
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        Rng rng(derive_seed(seed, {tag}));
        std::shuffle(idx.begin(), idx.end(), rng);
        const auto half = static_cast<std::ptrdiff_t>(idx.size() / 2);
        std::vector<std::size_t> fit(idx.begin(), idx.begin() + half);
        std::vector<std::size_t> held(idx.begin() + half, idx.end());
        return std::pair{m.select_rows(fit), m.select_rows(held)};
    };
    const auto [a_fit, a_held] = halves(a, seed_tag("a"));
    const auto [b_fit, b_held] = halves(b, seed_tag("b"));
    const auto clf = fit_domain_classifier(a_fit, b_fit, params, derive_seed(seed, {seed_tag("forest")}));

    std::vector<double> scores = clf.probability(a_held);
    const auto b_scores = clf.probability(b_held);
    std::vector<int> labels(scores.size(), 0);
    scores.insert(scores.end(), b_scores.begin(), b_scores.end());
    labels.resize(scores.size(), 1);
    return roc_auc(scores, labels);
}

void write_shift_diagnostics_csv(std::ostream& out, std::span<const double> sigma, const ShiftWeights& weights) {
    if (sigma.size() != weights.raw.size()) throw std::invalid_argument("shift diagnostics: length mismatch");
    out << "unit_id,sigma,raw_weight,normalized_weight\n";
    for (std::size_t i = 0; i < sigma.size(); ++i)
        out << i << ',' << format_exact(sigma[i]) << ',' << format_exact(weights.raw[i]) << ','
            << format_exact(weights.normalized[i]) << '\n';
}

}  // namespace allocbench
