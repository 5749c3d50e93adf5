#include "allocbench/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace allocbench {

double pehe(std::span<const double> tau_hat, std::span<const double> tau_true) {
    if (tau_hat.size() != tau_true.size()) throw std::invalid_argument("pehe: length mismatch");
    if (tau_hat.empty()) throw std::invalid_argument("pehe: empty input");
    double ss = 0.0;
    for (std::size_t i = 0; i < tau_hat.size(); ++i) ss += (tau_hat[i] - tau_true[i]) * (tau_hat[i] - tau_true[i]);
    return std::sqrt(ss / static_cast<double>(tau_hat.size()));
}

std::vector<double> average_ranks(std::span<const double> values) {
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(values.size());
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
        const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
        i = j + 1;
    }
    return ranks;
}

double roc_auc(std::span<const double> scores, std::span<const int> labels) {
    if (scores.size() != labels.size()) throw std::invalid_argument("roc_auc: length mismatch");
    const auto ranks = average_ranks(scores);
    double positive_rank_sum = 0.0;
    double positives = 0.0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] == 1) {
            positive_rank_sum += ranks[i];
            positives += 1.0;
        } else if (labels[i] != 0) {
            throw std::invalid_argument("roc_auc: labels must be 0 or 1");
        }
    }
    const double negatives = static_cast<double>(labels.size()) - positives;
    if (positives == 0.0 || negatives == 0.0) throw std::invalid_argument("roc_auc: both classes required");
    return (positive_rank_sum - positives * (positives + 1.0) / 2.0) / (positives * negatives);
}

double spearman_correlation(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size() || a.size() < 2) throw std::invalid_argument("spearman: need equal lengths >= 2");
    const auto ra = average_ranks(a);
    const auto rb = average_ranks(b);
    const double n = static_cast<double>(a.size());
    const double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / n;
    const double mb = std::accumulate(rb.begin(), rb.end(), 0.0) / n;
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < ra.size(); ++i) {
        sab += (ra[i] - ma) * (rb[i] - mb);
        saa += (ra[i] - ma) * (ra[i] - ma);
        sbb += (rb[i] - mb) * (rb[i] - mb);
    }
    if (saa == 0.0 || sbb == 0.0) throw std::invalid_argument("spearman: constant input");
    return sab / std::sqrt(saa * sbb);
}

}  // namespace allocbench
