// Aggregation of window-level results into the summary tables the harness
// reports: deployment-gap means per cost ratio, rolling summaries, bootstrap
// and mechanism tables, tertile and recalibration views, plus per-figure
// data files. Every emitted row carries the config hash of the run.
#pragma once

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "driftgate/dataset.hpp"
#include "driftgate/inference.hpp"
#include "driftgate/protocols.hpp"

namespace driftgate {

// Table of deployed-versus-oracle means for one cost ratio.
struct DeploymentGapRow {
    double cost_ratio = 0.0;
    std::int64_t n_windows = 0;
    double mean_deployed = 0.0;
    double mean_oracle = 0.0;
    double ratio_of_means = 0.0;     // mean deployed / mean oracle
    double mean_window_ratio = 0.0;  // mean of per-window ratios (defined ones)
    double mean_excess = 0.0;        // equals mean_deployed - mean_oracle
    std::int64_t n_ratio_excluded = 0;
};

DeploymentGapRow summarize_deployment(std::span<const WindowResult> one_ratio);

// Rolling-window descriptive means for one cost ratio.
struct RollingSummaryRow {
    double cost_ratio = 0.0;
    std::int64_t n_windows = 0;
    double mean_pr_auc = 0.0;
    double mean_roc_auc = 0.0;
    double mean_illicit_share = 0.0;
    double mean_tau_train = 0.0;
    double mean_loss_ratio = 0.0;
    double mean_excess = 0.0;
    std::int64_t n_auc_excluded = 0;
    std::int64_t n_ratio_excluded = 0;
};

RollingSummaryRow summarize_rolling(std::span<const WindowResult> one_ratio);

// Splits a mixed-ratio result list, preserving window order within a ratio.
std::map<double, std::vector<WindowResult>> group_by_ratio(
    std::span<const WindowResult> results);

// Per-window excess-loss series in test-step order (one cost ratio).
std::vector<double> excess_series(std::span<const WindowResult> one_ratio);

struct BootstrapTableRow {
    double cost_ratio = 0.0;
    BootstrapResult boot;
    double mean_loss_ratio = 0.0;
};

struct MechanismTableRow {
    double cost_ratio = 0.0;
    std::string iqr_source;  // "test" | "train"
    HacOlsResult ols;
};

struct RecalTableRow {
    RecalResult recal;
    double ci_low = 0.0;   // block bootstrap CI for frac_gap_closed
    double ci_high = 0.0;
};

// CSV writers; every row gets a trailing config_hash column.
void write_deployment_gap_csv(const std::filesystem::path& path,
                              std::span<const DeploymentGapRow> rows,
                              const std::string& config_hash);
void write_rolling_summary_csv(const std::filesystem::path& path,
                               std::span<const RollingSummaryRow> rows,
                               const std::string& config_hash);
void write_bootstrap_csv(const std::filesystem::path& path,
                         std::span<const BootstrapTableRow> rows,
                         const std::string& config_hash);
void write_mechanism_csv(const std::filesystem::path& path,
                         std::span<const MechanismTableRow> rows,
                         const std::string& config_hash);
void write_tertiles_csv(const std::filesystem::path& path,
                        const std::vector<std::pair<double, std::vector<TertileRow>>>& by_ratio,
                        const std::string& config_hash);
void write_recal_summary_csv(const std::filesystem::path& path,
                             std::span<const RecalTableRow> rows,
                             const std::string& config_hash);
void write_blocks_csv(const std::filesystem::path& path, std::span<const BlockStats> blocks,
                      const std::string& config_hash);

// Figure data for one cost ratio: step, losses, thresholds, loss ratio and
// prevalence per test window — enough to draw every loss/threshold/prevalence
// chart downstream.
void write_figure_data(const std::filesystem::path& path,
                       std::span<const WindowResult> one_ratio,
                       const std::string& config_hash);

}  // namespace driftgate
