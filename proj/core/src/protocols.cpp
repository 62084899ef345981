#include "driftgate/protocols.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "driftgate/csv.hpp"
#include "driftgate/errors.hpp"
#include "driftgate/rng.hpp"
#include "driftgate/stats.hpp"

namespace driftgate {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double share_of(std::span<const int> labels) {
    if (labels.empty()) return 0.0;
    std::int64_t pos = 0;
    for (int l : labels) pos += l;
    return static_cast<double>(pos) / static_cast<double>(labels.size());
}

bool both_classes(std::span<const int> labels) {
    bool has0 = false, has1 = false;
    for (int l : labels) (l == 1 ? has1 : has0) = true;
    return has0 && has1;
}

std::pair<int, int> step_range(const ScoredWindow& w) {
    int lo = std::numeric_limits<int>::max();
    int hi = std::numeric_limits<int>::min();
    for (int t : w.time_steps) {
        lo = std::min(lo, t);
        hi = std::max(hi, t);
    }
    return {lo, hi};
}

}  // namespace

void validate(const ProtocolConfig& pc) {
    if (!(pc.train_frac > 0.0 && pc.train_frac < 1.0))
        throw InputError("ProtocolConfig: train_frac must be in (0,1)");
    if (pc.rolling_window < 1) throw InputError("ProtocolConfig: rolling_window must be >= 1");
    if (pc.min_test_labeled < 1)
        throw InputError("ProtocolConfig: min_test_labeled must be >= 1");
    if (pc.cost_specs.empty()) throw InputError("ProtocolConfig: no cost specs");
    for (const auto& c : pc.cost_specs) validate(c);
}

WindowResult evaluate_deployment(const ScoredWindow& train, const ScoredWindow& test,
                                 const CostSpec& cost) {
    if (train.size() == 0 || test.size() == 0)
        throw ComputeError("evaluate_deployment: empty train or test window");

    WindowResult r;
    const auto [lo, hi] = step_range(test);
    r.test_step_lo = lo;
    r.test_step_hi = hi;
    r.cost_ratio = cost.ratio();

    const ThresholdResult deployed_cal = optimal_threshold(train, cost);
    r.tau_train = deployed_cal.tau;
    r.deployed_loss = regulatory_loss(confusion_at(test, r.tau_train), cost);

    const ThresholdResult oracle = oracle_threshold(test, cost);
    r.tau_oracle = oracle.tau;
    r.oracle_loss = oracle.loss;

    r.excess_loss = r.deployed_loss - r.oracle_loss;
    r.loss_ratio = r.oracle_loss > 0.0 ? r.deployed_loss / r.oracle_loss : kNaN;

    const bool two_class = both_classes(test.labels);
    r.pr_auc = two_class ? pr_auc(test) : kNaN;
    r.roc_auc = two_class ? roc_auc(test) : kNaN;
    r.top1_precision = top_k_precision(test, 0.01);

    r.illicit_share_test = share_of(test.labels);
    r.illicit_share_train = share_of(train.labels);
    r.prevalence_change = r.illicit_share_test - r.illicit_share_train;
    r.score_iqr_test = score_iqr(test);
    r.score_iqr_train = score_iqr(train);
    r.n_test = static_cast<std::int64_t>(test.size());
    return r;
}

FittedScorer fit_scorer(const Dataset& ds, std::span<const std::size_t> train_idx,
                        const ModelConfig& mc) {
    const Eigen::MatrixXd Xtr = feature_matrix(ds, train_idx);
    const std::vector<int> ytr = label_vector(ds, train_idx);
    FittedScorer s;
    s.standardizer = fit_standardizer(Xtr);
    s.model = train_logistic(s.standardizer.transform(Xtr), ytr, mc.lambda, mc.solver);
    return s;
}

ScoredWindow score_window(const Dataset& ds, std::span<const std::size_t> idx,
                          const FittedScorer& scorer) {
    ScoredWindow w;
    const Eigen::MatrixXd X = feature_matrix(ds, idx);
    // transform() standardizes with the training moments baked into scorer.
    Eigen::MatrixXd Xs = scorer.standardizer.transform(X);
    const Eigen::VectorXd z =
        ((Xs * scorer.model.weights).array() + scorer.model.intercept).matrix();
    w.scores.resize(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) {
        const double zi = z[static_cast<Eigen::Index>(i)];
        const double p = zi >= 0.0 ? 1.0 / (1.0 + std::exp(-zi))
                                   : std::exp(zi) / (1.0 + std::exp(zi));
        w.scores[i] = std::clamp(p, kProbEps, 1.0 - kProbEps);
    }
    w.labels = label_vector(ds, idx);
    w.time_steps.resize(idx.size());
    w.tx_ids.resize(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) {
        w.time_steps[i] = ds.records[idx[i]].time_step;
        w.tx_ids[i] = ds.records[idx[i]].tx_id;
    }
    return w;
}

std::vector<WindowResult> run_random_split(const Dataset& ds, const ModelConfig& mc,
                                           const ProtocolConfig& pc) {
    validate(pc);
    if (ds.size() < 2) throw ComputeError("run_random_split: dataset too small");

    // Stratified split: shuffle each label stratum independently, take the
    // first round(train_frac * n) rows for training.
    std::vector<std::size_t> strata[2];
    for (std::size_t i = 0; i < ds.size(); ++i)
        strata[ds.records[i].label == Label::Illicit ? 1 : 0].push_back(i);
    if (strata[0].empty() || strata[1].empty())
        throw ComputeError("run_random_split: degenerate strata (single-class dataset)");

    std::vector<std::size_t> train_idx, test_idx;
    for (int s = 0; s < 2; ++s) {
        auto& stratum = strata[s];
        Rng rng(mix_seed({pc.seed, 0xA11D0F5EULL, static_cast<std::uint64_t>(s)}));
        rng.shuffle(stratum);
        const auto n_train = static_cast<std::size_t>(std::floor(
            pc.train_frac * static_cast<double>(stratum.size()) + 0.5));
        for (std::size_t i = 0; i < stratum.size(); ++i)
            (i < n_train ? train_idx : test_idx).push_back(stratum[i]);
    }
    // Restore dataset order so scored windows stay deterministic.
    std::sort(train_idx.begin(), train_idx.end());
    std::sort(test_idx.begin(), test_idx.end());
    if (train_idx.empty() || test_idx.empty())
        throw ComputeError("run_random_split: empty train or test side");

    const FittedScorer scorer = fit_scorer(ds, train_idx, mc);
    const ScoredWindow train = score_window(ds, train_idx, scorer);
    const ScoredWindow test = score_window(ds, test_idx, scorer);

    std::vector<WindowResult> out;
    for (const auto& cost : pc.cost_specs) out.push_back(evaluate_deployment(train, test, cost));
    return out;
}

std::vector<WindowResult> run_forward_split(const Dataset& ds, const ModelConfig& mc,
                                            const ProtocolConfig& pc) {
    validate(pc);
    const std::vector<std::size_t> train_idx = indices_between(ds, ds.min_step, pc.split_step);
    const std::vector<std::size_t> test_idx = indices_between(ds, pc.split_step + 1, ds.max_step);
    if (train_idx.empty() || test_idx.empty())
        throw ComputeError("run_forward_split: empty train or test side at split step " +
                           std::to_string(pc.split_step));

    const FittedScorer scorer = fit_scorer(ds, train_idx, mc);
    const ScoredWindow train = score_window(ds, train_idx, scorer);
    const ScoredWindow test = score_window(ds, test_idx, scorer);

    std::vector<WindowResult> out;
    for (const auto& cost : pc.cost_specs) out.push_back(evaluate_deployment(train, test, cost));
    return out;
}

std::vector<RollingWindowScores> roll_and_score(const Dataset& ds, const ModelConfig& mc,
                                                const ProtocolConfig& pc,
                                                std::vector<SkippedWindow>* skips) {
    validate(pc);
    if (ds.max_step <= ds.min_step)
        throw ComputeError("roll_and_score: dataset spans a single time step");

    std::vector<RollingWindowScores> out;
    for (int t = ds.min_step + 1; t <= ds.max_step; ++t) {
        const int train_lo = std::max(ds.min_step, t - pc.rolling_window);
        const int train_hi = t - 1;
        const std::vector<std::size_t> test_idx = indices_between(ds, t, t);
        if (static_cast<int>(test_idx.size()) < pc.min_test_labeled) {
            if (skips)
                skips->push_back({t, "labeled test count " + std::to_string(test_idx.size()) +
                                         " below minimum " + std::to_string(pc.min_test_labeled)});
            continue;
        }
        const std::vector<std::size_t> train_idx = indices_between(ds, train_lo, train_hi);
        const std::vector<int> ytr = label_vector(ds, train_idx);
        if (train_idx.empty() || !both_classes(ytr)) {
            if (skips) skips->push_back({t, "training window lacks both classes"});
            continue;
        }

        RollingWindowScores w;
        w.test_step = t;
        w.train_lo = train_lo;
        w.train_hi = train_hi;
        const FittedScorer scorer = fit_scorer(ds, train_idx, mc);
        w.train = score_window(ds, train_idx, scorer);
        w.test = score_window(ds, test_idx, scorer);
        out.push_back(std::move(w));
    }
    if (out.empty()) throw ComputeError("roll_and_score: no eligible rolling windows");
    return out;
}

RollingRun run_rolling(const Dataset& ds, const ModelConfig& mc, const ProtocolConfig& pc) {
    RollingRun run;
    const auto scored = roll_and_score(ds, mc, pc, &run.skips);
    for (const auto& cost : pc.cost_specs) {
        for (const auto& w : scored) {
            WindowResult r = evaluate_deployment(w.train, w.test, cost);
            r.test_step_lo = r.test_step_hi = w.test_step;
            run.windows.push_back(r);
        }
    }
    return run;
}

RecalRun run_recalibration(const Dataset& ds, const ModelConfig& mc,
                           const ProtocolConfig& pc, std::span<const int> window_lens) {
    for (int w : window_lens) {
        if (w < 1) throw InputError("run_recalibration: window length must be >= 1");
        if (w > pc.rolling_window)
            throw InputError("run_recalibration: validation window " + std::to_string(w) +
                             " exceeds the training span of " +
                             std::to_string(pc.rolling_window) + " steps");
    }

    RecalRun run;
    const auto scored = roll_and_score(ds, mc, pc, &run.skips);

    for (const auto& cost : pc.cost_specs) {
        for (int wlen : window_lens) {
            std::vector<double> fracs;
            RecalResult summary;
            summary.cost_ratio = cost.ratio();
            summary.window_len = wlen;
            double sum_dep = 0.0, sum_rec = 0.0, sum_ora = 0.0;

            for (const auto& w : scored) {
                const ThresholdResult deployed_cal = optimal_threshold(w.train, cost);
                const double deployed =
                    regulatory_loss(confusion_at(w.test, deployed_cal.tau), cost);

                // Scores from the already-fitted model on the most recent
                // wlen steps of the training span (inside it, so no leakage).
                const int recal_lo = std::max(w.train_lo, w.test_step - wlen);
                ScoredWindow slice;
                for (std::size_t i = 0; i < w.train.size(); ++i) {
                    if (w.train.time_steps[i] < recal_lo) continue;
                    slice.scores.push_back(w.train.scores[i]);
                    slice.labels.push_back(w.train.labels[i]);
                    slice.time_steps.push_back(w.train.time_steps[i]);
                }
                const ThresholdResult recal_cal = optimal_threshold(slice, cost);
                const double recal =
                    regulatory_loss(confusion_at(w.test, recal_cal.tau), cost);

                const ThresholdResult oracle = oracle_threshold(w.test, cost);

                RecalWindow rw;
                rw.cost_ratio = cost.ratio();
                rw.window_len = wlen;
                rw.test_step = w.test_step;
                rw.deployed_loss = deployed;
                rw.recal_loss = recal;
                rw.oracle_loss = oracle.loss;
                rw.tau_deploy = deployed_cal.tau;
                rw.tau_recal = recal_cal.tau;
                rw.tau_oracle = oracle.tau;
                const double gap = deployed - oracle.loss;
                if (gap > 0.0) {
                    rw.frac_gap_closed = 1.0 - (recal - oracle.loss) / gap;
                    fracs.push_back(rw.frac_gap_closed);
                } else {
                    rw.frac_gap_closed = std::numeric_limits<double>::quiet_NaN();
                    ++summary.n_zero_gap;
                }
                run.windows.push_back(rw);

                sum_dep += deployed;
                sum_rec += recal;
                sum_ora += oracle.loss;
                ++summary.n_windows;
            }

            const auto n = static_cast<double>(summary.n_windows);
            summary.mean_deployed_loss = sum_dep / n;
            summary.mean_recal_loss = sum_rec / n;
            summary.mean_oracle_loss = sum_ora / n;
            summary.frac_gap_closed =
                fracs.empty() ? std::numeric_limits<double>::quiet_NaN() : mean_of(fracs);
            run.summary.push_back(summary);
        }
    }
    return run;
}

std::vector<TertileRow> tertile_summary(std::span<const WindowResult> results) {
    if (results.size() < 3)
        throw ComputeError("tertile_summary: need at least 3 windows");

    std::vector<std::size_t> order(results.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (results[a].illicit_share_test != results[b].illicit_share_test)
            return results[a].illicit_share_test < results[b].illicit_share_test;
        return results[a].test_step_lo < results[b].test_step_lo;
    });

    const std::size_t n = results.size();
    const std::size_t base = n / 3;
    const std::size_t rem = n % 3;

    std::vector<TertileRow> rows;
    std::size_t pos = 0;
    for (std::size_t q = 0; q < 3; ++q) {
        const std::size_t sz = base + (q < rem ? 1 : 0);  // remainder to lower tertiles
        TertileRow row;
        row.tertile = "Q" + std::to_string(q + 1);
        row.n = static_cast<std::int64_t>(sz);
        double sum_share = 0.0, sum_tau = 0.0, sum_excess = 0.0, sum_ratio = 0.0;
        std::int64_t n_ratio = 0;
        for (std::size_t k = 0; k < sz; ++k) {
            const WindowResult& r = results[order[pos++]];
            sum_share += r.illicit_share_test;
            sum_tau += r.tau_train;
            sum_excess += r.excess_loss;
            if (std::isfinite(r.loss_ratio)) {
                sum_ratio += r.loss_ratio;
                ++n_ratio;
            } else {
                ++row.n_ratio_excluded;
            }
        }
        const auto dsz = static_cast<double>(sz);
        row.mean_illicit_share = sum_share / dsz;
        row.mean_tau_deploy = sum_tau / dsz;
        row.mean_excess_loss = sum_excess / dsz;
        row.mean_loss_ratio = n_ratio ? sum_ratio / static_cast<double>(n_ratio)
                                      : std::numeric_limits<double>::quiet_NaN();
        rows.push_back(std::move(row));
    }
    return rows;
}

// ---------------------------------------------------------------------------
// WindowResult CSV
// ---------------------------------------------------------------------------

namespace {

const std::vector<std::string> kResultColumns = {
    "test_step_lo",       "test_step_hi",     "cost_ratio",
    "pr_auc",             "roc_auc",          "tau_train",
    "tau_oracle",         "deployed_loss",    "oracle_loss",
    "excess_loss",        "loss_ratio",       "illicit_share_test",
    "illicit_share_train", "prevalence_change", "score_iqr_test",
    "score_iqr_train",    "n_test",           "top1_precision"};

}  // namespace

void write_window_results(const std::filesystem::path& path,
                          std::span<const WindowResult> results,
                          std::span<const std::string> comments) {
    csv::Writer w(path);
    for (const auto& c : comments) w.comment(c);
    w.row(kResultColumns);
    using csv::format_double;
    for (const auto& r : results) {
        w.row({std::to_string(r.test_step_lo), std::to_string(r.test_step_hi),
               format_double(r.cost_ratio), format_double(r.pr_auc),
               format_double(r.roc_auc), format_double(r.tau_train),
               format_double(r.tau_oracle), format_double(r.deployed_loss),
               format_double(r.oracle_loss), format_double(r.excess_loss),
               format_double(r.loss_ratio), format_double(r.illicit_share_test),
               format_double(r.illicit_share_train), format_double(r.prevalence_change),
               format_double(r.score_iqr_test), format_double(r.score_iqr_train),
               std::to_string(r.n_test), format_double(r.top1_precision)});
    }
}

std::vector<WindowResult> read_window_results(const std::filesystem::path& path) {
    csv::Reader reader(path);
    auto header = reader.next();
    if (!header || header->fields != kResultColumns)
        throw InputError("not a window-result file (unexpected header): " + path.string());

    std::vector<WindowResult> out;
    while (auto row = reader.next()) {
        const std::string where = path.string() + " row " + std::to_string(row->line_no);
        if (row->fields.size() != kResultColumns.size())
            throw InputError("wrong column count at " + where);
        const auto& f = row->fields;
        WindowResult r;
        std::size_t c = 0;
        r.test_step_lo = static_cast<int>(csv::parse_int(f[c++], where));
        r.test_step_hi = static_cast<int>(csv::parse_int(f[c++], where));
        r.cost_ratio = csv::parse_double(f[c++], where);
        r.pr_auc = csv::parse_double(f[c++], where);
        r.roc_auc = csv::parse_double(f[c++], where);
        r.tau_train = csv::parse_double(f[c++], where);
        r.tau_oracle = csv::parse_double(f[c++], where);
        r.deployed_loss = csv::parse_double(f[c++], where);
        r.oracle_loss = csv::parse_double(f[c++], where);
        r.excess_loss = csv::parse_double(f[c++], where);
        r.loss_ratio = csv::parse_double(f[c++], where);
        r.illicit_share_test = csv::parse_double(f[c++], where);
        r.illicit_share_train = csv::parse_double(f[c++], where);
        r.prevalence_change = csv::parse_double(f[c++], where);
        r.score_iqr_test = csv::parse_double(f[c++], where);
        r.score_iqr_train = csv::parse_double(f[c++], where);
        r.n_test = csv::parse_int(f[c++], where);
        r.top1_precision = csv::parse_double(f[c++], where);
        out.push_back(r);
    }
    return out;
}

}  // namespace driftgate
