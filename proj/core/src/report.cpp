#include "driftgate/report.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "driftgate/csv.hpp"
#include "driftgate/errors.hpp"

namespace driftgate {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

}  // namespace

DeploymentGapRow summarize_deployment(std::span<const WindowResult> one_ratio) {
    if (one_ratio.empty()) throw ComputeError("summarize_deployment: no windows");
    DeploymentGapRow row;
    row.cost_ratio = one_ratio.front().cost_ratio;
    row.n_windows = static_cast<std::int64_t>(one_ratio.size());
    double sum_dep = 0.0, sum_ora = 0.0, sum_ratio = 0.0;
    std::int64_t n_ratio = 0;
    for (const auto& r : one_ratio) {
        sum_dep += r.deployed_loss;
        sum_ora += r.oracle_loss;
        if (std::isfinite(r.loss_ratio)) {
            sum_ratio += r.loss_ratio;
            ++n_ratio;
        } else {
            ++row.n_ratio_excluded;
        }
    }
    const auto n = static_cast<double>(one_ratio.size());
    row.mean_deployed = sum_dep / n;
    row.mean_oracle = sum_ora / n;
    row.ratio_of_means = row.mean_oracle > 0.0 ? row.mean_deployed / row.mean_oracle : kNaN;
    row.mean_window_ratio = n_ratio ? sum_ratio / static_cast<double>(n_ratio) : kNaN;
    row.mean_excess = row.mean_deployed - row.mean_oracle;
    return row;
}

RollingSummaryRow summarize_rolling(std::span<const WindowResult> one_ratio) {
    if (one_ratio.empty()) throw ComputeError("summarize_rolling: no windows");
    RollingSummaryRow row;
    row.cost_ratio = one_ratio.front().cost_ratio;
    row.n_windows = static_cast<std::int64_t>(one_ratio.size());
    double sum_pr = 0.0, sum_roc = 0.0, sum_share = 0.0, sum_tau = 0.0;
    double sum_ratio = 0.0, sum_excess = 0.0;
    std::int64_t n_auc = 0, n_ratio = 0;
    for (const auto& r : one_ratio) {
        if (std::isfinite(r.pr_auc) && std::isfinite(r.roc_auc)) {
            sum_pr += r.pr_auc;
            sum_roc += r.roc_auc;
            ++n_auc;
        } else {
            ++row.n_auc_excluded;
        }
        if (std::isfinite(r.loss_ratio)) {
            sum_ratio += r.loss_ratio;
            ++n_ratio;
        } else {
            ++row.n_ratio_excluded;
        }
        sum_share += r.illicit_share_test;
        sum_tau += r.tau_train;
        sum_excess += r.excess_loss;
    }
    const auto n = static_cast<double>(one_ratio.size());
    row.mean_pr_auc = n_auc ? sum_pr / static_cast<double>(n_auc) : kNaN;
    row.mean_roc_auc = n_auc ? sum_roc / static_cast<double>(n_auc) : kNaN;
    row.mean_illicit_share = sum_share / n;
    row.mean_tau_train = sum_tau / n;
    row.mean_loss_ratio = n_ratio ? sum_ratio / static_cast<double>(n_ratio) : kNaN;
    row.mean_excess = sum_excess / n;
    return row;
}

std::map<double, std::vector<WindowResult>> group_by_ratio(
    std::span<const WindowResult> results) {
    std::map<double, std::vector<WindowResult>> by_ratio;
    for (const auto& r : results) by_ratio[r.cost_ratio].push_back(r);
    for (auto& [ratio, rows] : by_ratio)
        std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
            return a.test_step_lo < b.test_step_lo;
        });
    return by_ratio;
}

std::vector<double> excess_series(std::span<const WindowResult> one_ratio) {
    std::vector<WindowResult> sorted(one_ratio.begin(), one_ratio.end());
    std::stable_sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
        return a.test_step_lo < b.test_step_lo;
    });
    std::vector<double> s;
    s.reserve(sorted.size());
    for (const auto& r : sorted) s.push_back(r.excess_loss);
    return s;
}

void write_deployment_gap_csv(const std::filesystem::path& path,
                              std::span<const DeploymentGapRow> rows,
                              const std::string& config_hash) {
    csv::Writer w(path);
    w.row({"cost_ratio", "n_windows", "mean_deployed", "mean_oracle", "ratio_of_means",
           "mean_window_ratio", "mean_excess", "n_ratio_excluded", "config_hash"});
    for (const auto& r : rows)
        w.row({csv::format_double(r.cost_ratio), std::to_string(r.n_windows),
               csv::format_double(r.mean_deployed), csv::format_double(r.mean_oracle),
               csv::format_double(r.ratio_of_means), csv::format_double(r.mean_window_ratio),
               csv::format_double(r.mean_excess), std::to_string(r.n_ratio_excluded),
               config_hash});
}

void write_rolling_summary_csv(const std::filesystem::path& path,
                               std::span<const RollingSummaryRow> rows,
                               const std::string& config_hash) {
    csv::Writer w(path);
    w.row({"cost_ratio", "n_windows", "mean_pr_auc", "mean_roc_auc", "mean_illicit_share",
           "mean_tau_train", "mean_loss_ratio", "mean_excess", "n_auc_excluded",
           "n_ratio_excluded", "config_hash"});
    for (const auto& r : rows)
        w.row({csv::format_double(r.cost_ratio), std::to_string(r.n_windows),
               csv::format_double(r.mean_pr_auc), csv::format_double(r.mean_roc_auc),
               csv::format_double(r.mean_illicit_share), csv::format_double(r.mean_tau_train),
               csv::format_double(r.mean_loss_ratio), csv::format_double(r.mean_excess),
               std::to_string(r.n_auc_excluded), std::to_string(r.n_ratio_excluded),
               config_hash});
}

void write_bootstrap_csv(const std::filesystem::path& path,
                         std::span<const BootstrapTableRow> rows,
                         const std::string& config_hash) {
    csv::Writer w(path);
    w.row({"cost_ratio", "statistic", "block_length", "point_estimate", "se", "ci_low",
           "ci_high", "mean_loss_ratio", "config_hash"});
    for (const auto& r : rows)
        w.row({csv::format_double(r.cost_ratio), r.boot.statistic,
               std::to_string(r.boot.block_length), csv::format_double(r.boot.point_estimate),
               csv::format_double(r.boot.se), csv::format_double(r.boot.ci_low),
               csv::format_double(r.boot.ci_high), csv::format_double(r.mean_loss_ratio),
               config_hash});
}

void write_mechanism_csv(const std::filesystem::path& path,
                         std::span<const MechanismTableRow> rows,
                         const std::string& config_hash) {
    csv::Writer w(path);
    w.row({"cost_ratio", "iqr_source", "variable", "coef", "hac_se", "t_stat", "p_value",
           "r_squared", "n_obs", "lags", "n_excluded", "config_hash"});
    for (const auto& r : rows) {
        for (const auto& c : r.ols.coefficients)
            w.row({csv::format_double(r.cost_ratio), r.iqr_source, c.name,
                   csv::format_double(c.coef), csv::format_double(c.hac_se),
                   csv::format_double(c.t_stat), csv::format_double(c.p_value),
                   csv::format_double(r.ols.r_squared), std::to_string(r.ols.n_obs),
                   std::to_string(r.ols.lags), std::to_string(r.ols.n_excluded), config_hash});
    }
}

void write_tertiles_csv(const std::filesystem::path& path,
                        const std::vector<std::pair<double, std::vector<TertileRow>>>& by_ratio,
                        const std::string& config_hash) {
    csv::Writer w(path);
    w.row({"cost_ratio", "tertile", "n", "mean_illicit_share", "mean_tau_deploy",
           "mean_loss_ratio", "mean_excess_loss", "n_ratio_excluded", "config_hash"});
    for (const auto& [ratio, rows] : by_ratio)
        for (const auto& r : rows)
            w.row({csv::format_double(ratio), r.tertile, std::to_string(r.n),
                   csv::format_double(r.mean_illicit_share),
                   csv::format_double(r.mean_tau_deploy), csv::format_double(r.mean_loss_ratio),
                   csv::format_double(r.mean_excess_loss), std::to_string(r.n_ratio_excluded),
                   config_hash});
}

void write_recal_summary_csv(const std::filesystem::path& path,
                             std::span<const RecalTableRow> rows,
                             const std::string& config_hash) {
    csv::Writer w(path);
    w.row({"cost_ratio", "window_len", "mean_deployed_loss", "mean_recal_loss",
           "mean_oracle_loss", "frac_gap_closed", "ci_low", "ci_high", "n_windows",
           "n_zero_gap", "config_hash"});
    for (const auto& r : rows)
        w.row({csv::format_double(r.recal.cost_ratio), std::to_string(r.recal.window_len),
               csv::format_double(r.recal.mean_deployed_loss),
               csv::format_double(r.recal.mean_recal_loss),
               csv::format_double(r.recal.mean_oracle_loss),
               csv::format_double(r.recal.frac_gap_closed), csv::format_double(r.ci_low),
               csv::format_double(r.ci_high), std::to_string(r.recal.n_windows),
               std::to_string(r.recal.n_zero_gap), config_hash});
}

void write_blocks_csv(const std::filesystem::path& path, std::span<const BlockStats> blocks,
                      const std::string& config_hash) {
    csv::Writer w(path);
    w.row({"step_lo", "step_hi", "count", "illicit_share", "cumulative_illicit_share",
           "config_hash"});
    for (const auto& b : blocks)
        w.row({std::to_string(b.lo), std::to_string(b.hi), std::to_string(b.count),
               csv::format_double(b.illicit_share),
               csv::format_double(b.cumulative_illicit_share), config_hash});
}

void write_figure_data(const std::filesystem::path& path,
                       std::span<const WindowResult> one_ratio,
                       const std::string& config_hash) {
    std::vector<WindowResult> sorted(one_ratio.begin(), one_ratio.end());
    std::stable_sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
        return a.test_step_lo < b.test_step_lo;
    });
    csv::Writer w(path);
    w.comment("config_hash=" + config_hash);
    w.row({"step", "deployed_loss", "oracle_loss", "tau_train", "tau_oracle", "loss_ratio",
           "prevalence"});
    for (const auto& r : sorted)
        w.row({std::to_string(r.test_step_lo), csv::format_double(r.deployed_loss),
               csv::format_double(r.oracle_loss), csv::format_double(r.tau_train),
               csv::format_double(r.tau_oracle), csv::format_double(r.loss_ratio),
               csv::format_double(r.illicit_share_test)});
}

}  // namespace driftgate
