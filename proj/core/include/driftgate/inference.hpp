// Serial-dependence-aware inference on rolling-window outcome series: a
// moving block bootstrap for means with percentile intervals, and OLS with
// Newey-West (Bartlett kernel) HAC standard errors for the mechanism
// decomposition of log loss ratios.
#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "driftgate/protocols.hpp"

namespace driftgate {

struct BootstrapSpec {
    std::vector<int> block_lengths = {3, 5, 7};
    int replications = 5000;
    std::uint64_t seed = 0;
    double ci_level = 0.95;
};

void validate(const BootstrapSpec& spec);

struct BootstrapResult {
    std::string statistic;
    int block_length = 0;
    double point_estimate = 0.0;  // the plain sample statistic, seed-free
    double se = 0.0;              // sample std of replicate statistics
    double ci_low = 0.0;          // percentile interval
    double ci_high = 0.0;
};

// Overlapping blocks of length L at every start index; each replicate draws
// ceil(n/L) blocks with replacement, concatenates, truncates to n, and takes
// the mean. Replicate r's stream derives from (seed, L, r) alone, so results
// are independent of evaluation order.
std::vector<BootstrapResult> moving_block_bootstrap(std::span<const double> series,
                                                    const BootstrapSpec& spec,
                                                    const std::string& statistic_name);

struct HacCoefficient {
    std::string name;
    double coef = 0.0;
    double hac_se = 0.0;
    double t_stat = 0.0;
    double p_value = 0.0;
};

struct HacOlsResult {
    std::vector<HacCoefficient> coefficients;
    double r_squared = 0.0;
    std::int64_t n_obs = 0;
    int lags = 0;
    std::int64_t n_excluded = 0;  // windows dropped before the regression
};

// OLS of y on X (X includes any constant column the caller wants) with
// Newey-West HAC covariance using Bartlett weights 1 - j/(lags+1). Two-sided
// p-values from the t distribution with n - k degrees of freedom. With
// lags = 0 this reduces to the White heteroskedasticity-robust estimator.
HacOlsResult hac_ols(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                     std::span<const std::string> names, int lags);

enum class IqrSource { Test, Train };

// Mechanism regression: log(deployed/oracle) on standardized
// {log illicit prevalence, log score IQR, prevalence change} plus a constant.
// Windows with an undefined loss ratio or nonpositive log arguments are
// excluded; the exclusion count is reported. Pass the windows of one cost
// ratio, ordered by test step.
HacOlsResult mechanism_ols(std::span<const WindowResult> results, IqrSource iqr_source,
                           int lags);

}  // namespace driftgate
