// Deployment protocols: random stratified split, forward temporal split, and
// rolling train-on-trailing-window evaluation, plus threshold recalibration
// sweeps and tertile summaries. Each protocol calibrates the enforcement
// threshold on training scores only, deploys it on the test slice, and
// benchmarks against the infeasible contemporaneous-oracle threshold.
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "driftgate/dataset.hpp"
#include "driftgate/metrics.hpp"
#include "driftgate/scoring.hpp"

namespace driftgate {

struct ModelConfig {
    double lambda = 1.0;
    SolverOptions solver;
};

struct ProtocolConfig {
    double train_frac = 0.70;   // random split
    int split_step = 34;        // forward split: last training step
    int rolling_window = 10;    // trailing training steps per rolling window
    int min_test_labeled = 50;  // rolling eligibility filter
    std::vector<CostSpec> cost_specs;
    std::uint64_t seed = 0;
};

void validate(const ProtocolConfig& pc);

// Everything measured for one (test window, cost spec) pair.
struct WindowResult {
    int test_step_lo = 0;
    int test_step_hi = 0;
    double cost_ratio = 0.0;
    double pr_auc = 0.0;   // NaN when the test window is single-class
    double roc_auc = 0.0;  // NaN when the test window is single-class
    double tau_train = 0.0;
    double tau_oracle = 0.0;
    double deployed_loss = 0.0;
    double oracle_loss = 0.0;
    double excess_loss = 0.0;
    double loss_ratio = 0.0;  // NaN when oracle_loss == 0 (undefined)
    double illicit_share_test = 0.0;
    double illicit_share_train = 0.0;
    double prevalence_change = 0.0;  // test share - train share
    double score_iqr_test = 0.0;
    double score_iqr_train = 0.0;
    std::int64_t n_test = 0;
    double top1_precision = 0.0;  // NaN when undefined
};

// Model-free core shared by every protocol: calibrate on `train`, deploy on
// `test`, benchmark against the oracle. This is also the entry point for
// externally produced score files (see import_scores).
WindowResult evaluate_deployment(const ScoredWindow& train, const ScoredWindow& test,
                                 const CostSpec& cost);

struct FittedScorer {
    Standardizer standardizer;
    LogisticModel model;
};

// Fits standardizer and model on the given rows only.
FittedScorer fit_scorer(const Dataset& ds, std::span<const std::size_t> train_idx,
                        const ModelConfig& mc);
ScoredWindow score_window(const Dataset& ds, std::span<const std::size_t> idx,
                          const FittedScorer& scorer);

// One WindowResult per cost spec (stratified 70/30, temporal ordering ignored).
std::vector<WindowResult> run_random_split(const Dataset& ds, const ModelConfig& mc,
                                           const ProtocolConfig& pc);

// One WindowResult per cost spec (train t <= split_step, test t > split_step).
std::vector<WindowResult> run_forward_split(const Dataset& ds, const ModelConfig& mc,
                                            const ProtocolConfig& pc);

struct SkippedWindow {
    int test_step = 0;
    std::string reason;
};

// One scored rolling window: model fit on [train_lo, train_hi], deployed on
// test_step. Kept around so recalibration can slice the training scores.
struct RollingWindowScores {
    int test_step = 0;
    int train_lo = 0;
    int train_hi = 0;
    ScoredWindow train;
    ScoredWindow test;
};

// Rolling eligibility: every test step after the first dataset step, trained
// on the up-to-rolling_window preceding steps (early windows use what exists).
// Steps are skipped when the labeled test count is under min_test_labeled or
// the training side lacks both classes; skip reasons are reported. Eligibility
// is cost-independent by construction.
std::vector<RollingWindowScores> roll_and_score(const Dataset& ds, const ModelConfig& mc,
                                                const ProtocolConfig& pc,
                                                std::vector<SkippedWindow>* skips = nullptr);

struct RollingRun {
    // Sorted by (cost_ratio, test_step).
    std::vector<WindowResult> windows;
    std::vector<SkippedWindow> skips;
};

RollingRun run_rolling(const Dataset& ds, const ModelConfig& mc, const ProtocolConfig& pc);

// Per-window recalibration outcome for one validation-window length.
struct RecalWindow {
    double cost_ratio = 0.0;
    int window_len = 0;
    int test_step = 0;
    double deployed_loss = 0.0;
    double recal_loss = 0.0;
    double oracle_loss = 0.0;
    double tau_deploy = 0.0;
    double tau_recal = 0.0;
    double tau_oracle = 0.0;
    double frac_gap_closed = 0.0;  // NaN when deployed == oracle (no gap)
};

struct RecalResult {
    double cost_ratio = 0.0;
    int window_len = 0;
    double mean_deployed_loss = 0.0;
    double mean_recal_loss = 0.0;
    double mean_oracle_loss = 0.0;
    // Mean of the per-window fractions 1 - (recal-oracle)/(deployed-oracle),
    // over windows with a positive deployment gap.
    double frac_gap_closed = 0.0;
    std::int64_t n_windows = 0;
    std::int64_t n_zero_gap = 0;
};

struct RecalRun {
    std::vector<RecalWindow> windows;   // sorted by (cost_ratio, window_len, test_step)
    std::vector<RecalResult> summary;   // sorted by (cost_ratio, window_len)
    std::vector<SkippedWindow> skips;
};

// Threshold-only recalibration: the model stays fixed; the threshold is
// re-optimized on the scores from the most recent `w` steps of each training
// span (clamped to the span for early windows).
RecalRun run_recalibration(const Dataset& ds, const ModelConfig& mc,
                           const ProtocolConfig& pc, std::span<const int> window_lens);

struct TertileRow {
    std::string tertile;  // "Q1".."Q3", sorted by test illicit share ascending
    std::int64_t n = 0;
    double mean_illicit_share = 0.0;
    double mean_tau_deploy = 0.0;
    double mean_loss_ratio = 0.0;  // over defined ratios
    double mean_excess_loss = 0.0;
    std::int64_t n_ratio_excluded = 0;
};

// Windows sorted into three groups by test illicit share (remainders go to
// the lower tertiles). Call with the windows of a single cost ratio.
std::vector<TertileRow> tertile_summary(std::span<const WindowResult> results);

// WindowResult CSV: stable column order, one row per window; '#' comment
// lines carry run provenance and are ignored on read.
void write_window_results(const std::filesystem::path& path,
                          std::span<const WindowResult> results,
                          std::span<const std::string> comments);
std::vector<WindowResult> read_window_results(const std::filesystem::path& path);

}  // namespace driftgate
