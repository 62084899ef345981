#include "driftgate/inference.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>

#include "driftgate/errors.hpp"
#include "driftgate/rng.hpp"
#include "driftgate/stats.hpp"

namespace driftgate {

void validate(const BootstrapSpec& spec) {
    if (spec.block_lengths.empty()) throw InputError("BootstrapSpec: no block lengths");
    for (int l : spec.block_lengths)
        if (l < 1) throw InputError("BootstrapSpec: block length must be >= 1");
    if (spec.replications < 1) throw InputError("BootstrapSpec: replications must be >= 1");
    if (!(spec.ci_level > 0.0 && spec.ci_level < 1.0))
        throw InputError("BootstrapSpec: ci_level must be in (0,1)");
}

std::vector<BootstrapResult> moving_block_bootstrap(std::span<const double> series,
                                                    const BootstrapSpec& spec,
                                                    const std::string& statistic_name) {
    validate(spec);
    const std::size_t n = series.size();
    if (n == 0) throw ComputeError("moving_block_bootstrap: empty series");

    const double point = mean_of(series);
    const double alpha = 1.0 - spec.ci_level;

    std::vector<BootstrapResult> out;
    for (int L : spec.block_lengths) {
        const auto len = static_cast<std::size_t>(L);
        if (len > n)
            throw ComputeError("moving_block_bootstrap: block length " + std::to_string(L) +
                               " exceeds series length " + std::to_string(n));
        const std::size_t n_starts = n - len + 1;
        const std::size_t k = (n + len - 1) / len;  // ceil(n/L) blocks per replicate

        std::vector<double> stats(static_cast<std::size_t>(spec.replications));
        for (int r = 0; r < spec.replications; ++r) {
            Rng rng(mix_seed({spec.seed, static_cast<std::uint64_t>(L),
                              static_cast<std::uint64_t>(r)}));
            double sum = 0.0;
            std::size_t filled = 0;
            for (std::size_t b = 0; b < k && filled < n; ++b) {
                const auto start = static_cast<std::size_t>(rng.next_below(n_starts));
                for (std::size_t j = 0; j < len && filled < n; ++j, ++filled)
                    sum += series[start + j];
            }
            stats[static_cast<std::size_t>(r)] = sum / static_cast<double>(n);
        }

        BootstrapResult res;
        res.statistic = statistic_name;
        res.block_length = L;
        res.point_estimate = point;
        res.se = sample_std(stats);
        std::sort(stats.begin(), stats.end());
        res.ci_low = quantile_sorted(stats, alpha / 2.0);
        res.ci_high = quantile_sorted(stats, 1.0 - alpha / 2.0);
        out.push_back(std::move(res));
    }
    return out;
}

HacOlsResult hac_ols(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                     std::span<const std::string> names, int lags) {
    const Eigen::Index n = X.rows();
    const Eigen::Index k = X.cols();
    if (n != y.size()) throw std::invalid_argument("hac_ols: X/y row mismatch");
    if (static_cast<Eigen::Index>(names.size()) != k)
        throw std::invalid_argument("hac_ols: one name per column required");
    if (lags < 0) throw std::invalid_argument("hac_ols: lags must be >= 0");
    if (n <= k) throw ComputeError("hac_ols: not enough observations");

    const Eigen::MatrixXd xtx = X.transpose() * X;
    const Eigen::FullPivLU<Eigen::MatrixXd> lu(xtx);
    if (!lu.isInvertible()) throw ComputeError("hac_ols: rank-deficient design");
    const Eigen::MatrixXd xtx_inv = lu.inverse();

    const Eigen::VectorXd beta = xtx_inv * (X.transpose() * y);
    const Eigen::VectorXd resid = y - X * beta;

    // Score series u_t = x_t * e_t; Bartlett-weighted long-run covariance.
    const Eigen::MatrixXd U = (X.array().colwise() * resid.array()).matrix();
    Eigen::MatrixXd S = U.transpose() * U;
    for (int j = 1; j <= lags; ++j) {
        if (j >= n) break;
        const double w = 1.0 - static_cast<double>(j) / static_cast<double>(lags + 1);
        const Eigen::MatrixXd gamma =
            U.bottomRows(n - j).transpose() * U.topRows(n - j);
        S += w * (gamma + gamma.transpose());
    }
    const Eigen::MatrixXd cov = xtx_inv * S * xtx_inv;

    const double dof = static_cast<double>(n - k);
    const boost::math::students_t tdist(dof);

    HacOlsResult res;
    res.n_obs = n;
    res.lags = lags;
    for (Eigen::Index i = 0; i < k; ++i) {
        HacCoefficient c;
        c.name = names[static_cast<std::size_t>(i)];
        c.coef = beta[i];
        c.hac_se = std::sqrt(std::max(cov(i, i), 0.0));
        c.t_stat = c.hac_se > 0.0 ? c.coef / c.hac_se
                                  : std::numeric_limits<double>::quiet_NaN();
        c.p_value = std::isfinite(c.t_stat)
                        ? 2.0 * boost::math::cdf(tdist, -std::abs(c.t_stat))
                        : std::numeric_limits<double>::quiet_NaN();
        res.coefficients.push_back(std::move(c));
    }

    const double y_mean = y.mean();
    const double sst = (y.array() - y_mean).square().sum();
    const double ssr = resid.squaredNorm();
    res.r_squared = sst > 0.0 ? 1.0 - ssr / sst : 0.0;
    return res;
}

HacOlsResult mechanism_ols(std::span<const WindowResult> results, IqrSource iqr_source,
                           int lags) {
    std::vector<double> dv, log_prev, log_iqr, prev_change;
    std::int64_t excluded = 0;
    for (const auto& r : results) {
        const double iqr = iqr_source == IqrSource::Test ? r.score_iqr_test : r.score_iqr_train;
        const bool usable = std::isfinite(r.loss_ratio) && r.loss_ratio > 0.0 &&
                            r.deployed_loss > 0.0 && r.illicit_share_test > 0.0 && iqr > 0.0;
        if (!usable) {
            ++excluded;
            continue;
        }
        dv.push_back(std::log(r.deployed_loss / r.oracle_loss));
        log_prev.push_back(std::log(r.illicit_share_test));
        log_iqr.push_back(std::log(iqr));
        prev_change.push_back(r.prevalence_change);
    }

    const auto n = static_cast<Eigen::Index>(dv.size());
    constexpr int kRegressors = 3;
    if (n < lags + kRegressors + 2)
        throw ComputeError("mechanism_ols: too few usable windows (" + std::to_string(n) + ")");

    // Standardize each regressor to mean 0, population std 1.
    const auto standardize = [](std::vector<double>& v) {
        const double m = mean_of(v);
        double sd = population_std(v);
        if (sd <= 0.0) throw ComputeError("mechanism_ols: constant regressor");
        for (double& x : v) x = (x - m) / sd;
    };
    standardize(log_prev);
    standardize(log_iqr);
    standardize(prev_change);

    Eigen::MatrixXd X(n, kRegressors + 1);
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto s = static_cast<std::size_t>(i);
        X(i, 0) = 1.0;
        X(i, 1) = log_prev[s];
        X(i, 2) = log_iqr[s];
        X(i, 3) = prev_change[s];
        y[i] = dv[s];
    }
    const std::vector<std::string> names = {"const", "log_illicit_prevalence",
                                            "log_score_iqr", "prevalence_change"};
    HacOlsResult res = hac_ols(X, y, names, lags);
    res.n_excluded = excluded;
    return res;
}

}  // namespace driftgate
