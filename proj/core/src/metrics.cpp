#include "driftgate/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "driftgate/errors.hpp"
#include "driftgate/stats.hpp"

namespace driftgate {

void validate(const CostSpec& cost) {
    if (!(cost.c_fn > 0.0) || !(cost.c_fp > 0.0))
        throw std::invalid_argument("CostSpec: costs must be > 0");
    if (!std::isfinite(cost.c_fn / cost.c_fp))
        throw std::invalid_argument("CostSpec: cost ratio must be finite");
}

double flag_nothing_tau() { return std::nextafter(1.0, 2.0); }

ConfusionCounts confusion_at(const ScoredWindow& window, double tau) {
    ConfusionCounts c;
    for (std::size_t i = 0; i < window.size(); ++i) {
        const bool flagged = window.scores[i] >= tau;
        const bool illicit = window.labels[i] == 1;
        if (flagged && illicit) ++c.tp;
        else if (flagged) ++c.fp;
        else if (illicit) ++c.fn;
        else ++c.tn;
    }
    return c;
}

double regulatory_loss(const ConfusionCounts& counts, const CostSpec& cost) {
    return cost.c_fn * static_cast<double>(counts.fn) +
           cost.c_fp * static_cast<double>(counts.fp);
}

ThresholdResult optimal_threshold(const ScoredWindow& window, const CostSpec& cost) {
    if (window.size() == 0) throw ComputeError("optimal_threshold: empty window");
    validate(cost);

    // Sort scores descending with labels attached; sweep thresholds from the
    // flag-nothing sentinel down through each unique score. Counts stay in
    // integers so candidate losses are computed exactly the same way
    // regulatory_loss computes them.
    const std::size_t n = window.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return window.scores[a] > window.scores[b];
    });

    std::int64_t total_pos = 0;
    for (int lab : window.labels) total_pos += lab;
    const std::int64_t total_neg = static_cast<std::int64_t>(n) - total_pos;

    // Start: flag nothing.
    std::int64_t tp = 0, fp = 0;
    double best_tau = flag_nothing_tau();
    double best_loss = cost.c_fn * static_cast<double>(total_pos);
    ConfusionCounts best_counts{0, 0, total_neg, total_pos};

    std::size_t i = 0;
    while (i < n) {
        const double s = window.scores[order[i]];
        // Absorb the whole tie group at this score.
        while (i < n && window.scores[order[i]] == s) {
            if (window.labels[order[i]] == 1) ++tp;
            else ++fp;
            ++i;
        }
        const std::int64_t fn = total_pos - tp;
        const double loss =
            cost.c_fn * static_cast<double>(fn) + cost.c_fp * static_cast<double>(fp);
        // Sweeping toward lower tau: <= implements the lowest-tau tie-break.
        if (loss <= best_loss) {
            best_loss = loss;
            best_tau = s;
            best_counts = ConfusionCounts{tp, fp, total_neg - fp, fn};
        }
    }

    return ThresholdResult{best_tau, best_loss, best_counts};
}

ThresholdResult oracle_threshold(const ScoredWindow& test_window, const CostSpec& cost) {
    return optimal_threshold(test_window, cost);
}

double roc_auc(const ScoredWindow& window) {
    std::int64_t pos = 0;
    for (int lab : window.labels) pos += lab;
    const std::int64_t neg = static_cast<std::int64_t>(window.size()) - pos;
    if (pos == 0 || neg == 0)
        throw ComputeError("roc_auc: undefined metric on single-class window");

    // Mann-Whitney U via midranks: AUC = (R_pos - P(P+1)/2) / (P*N).
    const std::size_t n = window.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return window.scores[a] < window.scores[b];
    });

    double rank_sum_pos = 0.0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j < n && window.scores[order[j]] == window.scores[order[i]]) ++j;
        // 1-based midrank for the tie group [i, j).
        const double midrank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
        for (std::size_t k = i; k < j; ++k)
            if (window.labels[order[k]] == 1) rank_sum_pos += midrank;
        i = j;
    }
    const double p = static_cast<double>(pos);
    const double u = rank_sum_pos - p * (p + 1.0) / 2.0;
    return u / (p * static_cast<double>(neg));
}

double pr_auc(const ScoredWindow& window) {
    std::int64_t pos = 0;
    for (int lab : window.labels) pos += lab;
    if (pos == 0) throw ComputeError("pr_auc: no positives in window");

    const std::size_t n = window.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return window.scores[a] > window.scores[b];
    });

    double ap = 0.0;
    std::int64_t tp = 0;
    std::int64_t seen = 0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        std::int64_t group_tp = 0;
        while (j < n && window.scores[order[j]] == window.scores[order[i]]) {
            group_tp += window.labels[order[j]];
            ++j;
        }
        tp += group_tp;
        seen += static_cast<std::int64_t>(j - i);
        if (group_tp > 0) {
            const double precision = static_cast<double>(tp) / static_cast<double>(seen);
            const double recall_inc =
                static_cast<double>(group_tp) / static_cast<double>(pos);
            ap += precision * recall_inc;
        }
        i = j;
    }
    return ap;
}

double top_k_precision(const ScoredWindow& window, double k_frac) {
    if (!(k_frac > 0.0 && k_frac <= 1.0))
        throw std::invalid_argument("top_k_precision: k_frac must be in (0,1]");
    const std::size_t n = window.size();
    if (n == 0) throw std::invalid_argument("top_k_precision: empty window");

    const auto n_top = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::ceil(k_frac * static_cast<double>(n))));

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    // Ties resolved toward the lower window index: stable sort on score only.
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return window.scores[a] > window.scores[b];
    });

    std::int64_t illicit = 0;
    for (std::size_t i = 0; i < n_top; ++i) illicit += window.labels[order[i]];
    return static_cast<double>(illicit) / static_cast<double>(n_top);
}

double score_iqr(const ScoredWindow& window) {
    if (window.size() == 0) throw std::invalid_argument("score_iqr: empty window");
    std::vector<double> s = window.scores;
    std::sort(s.begin(), s.end());
    return quantile_sorted(s, 0.75) - quantile_sorted(s, 0.25);
}

}  // namespace driftgate
