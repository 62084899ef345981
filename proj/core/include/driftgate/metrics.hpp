// Cost-sensitive evaluation primitives: confusion counts at a threshold,
// regulatory loss in levels, exact loss-minimizing threshold search, ranking
// metrics (ROC-AUC, average precision, top-k precision) and score dispersion.
//
// Threshold semantics throughout: a record is flagged iff score >= tau
// (inclusive). Loss is piecewise constant in tau with breakpoints at the
// unique scores, so minimizing over {unique scores} plus one flag-nothing
// sentinel above every score is exact over all real thresholds.
#pragma once

#include <cstdint>
#include <span>

#include "driftgate/scoring.hpp"

namespace driftgate {

// Unit costs of the two error types; both strictly positive.
struct CostSpec {
    double c_fn = 1.0;
    double c_fp = 1.0;

    double ratio() const { return c_fn / c_fp; }
};

void validate(const CostSpec& cost);

struct ConfusionCounts {
    std::int64_t tp = 0;
    std::int64_t fp = 0;
    std::int64_t tn = 0;
    std::int64_t fn = 0;

    std::int64_t total() const { return tp + fp + tn + fn; }
};

struct ThresholdResult {
    double tau = 0.0;
    double loss = 0.0;
    ConfusionCounts counts;
};

// The flag-nothing candidate threshold: just above the top of the score
// range, so it flags nothing even when some score equals 1 exactly.
double flag_nothing_tau();

ConfusionCounts confusion_at(const ScoredWindow& window, double tau);

// c_fn*FN + c_fp*FP, in levels.
double regulatory_loss(const ConfusionCounts& counts, const CostSpec& cost);

// Exact minimizer of regulatory loss over all real thresholds; ties broken
// toward the lowest tau. The returned loss is recomputed from the counts.
ThresholdResult optimal_threshold(const ScoredWindow& window, const CostSpec& cost);

// Same search on a contemporaneous test window: an infeasible benchmark,
// kept as a separate entry point so call sites say what they mean.
ThresholdResult oracle_threshold(const ScoredWindow& test_window, const CostSpec& cost);

// Probability that a random illicit score exceeds a random licit score,
// ties counted 1/2 (Mann-Whitney). Throws on single-class windows.
double roc_auc(const ScoredWindow& window);

// Average precision: sum of precision-at-cut times recall increment over
// descending-score cuts, with equal scores grouped. Throws without positives.
double pr_auc(const ScoredWindow& window);

// Illicit share among the max(1, ceil(k_frac*N)) highest-scored records;
// ties broken toward the lower window index.
double top_k_precision(const ScoredWindow& window, double k_frac);

// 75th minus 25th percentile of the scores, linear-interpolation quantiles.
double score_iqr(const ScoredWindow& window);

}  // namespace driftgate
