// Small shared numeric helpers.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace driftgate {

inline double mean_of(std::span<const double> xs) {
    if (xs.empty()) throw std::invalid_argument("mean_of: empty input");
    double s = 0.0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
}

// Sample standard deviation (divide by n-1); 0 for a single observation.
inline double sample_std(std::span<const double> xs) {
    if (xs.empty()) throw std::invalid_argument("sample_std: empty input");
    if (xs.size() == 1) return 0.0;
    const double m = mean_of(xs);
    double ss = 0.0;
    for (double x : xs) ss += (x - m) * (x - m);
    return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

// Population standard deviation (divide by n).
inline double population_std(std::span<const double> xs) {
    if (xs.empty()) throw std::invalid_argument("population_std: empty input");
    const double m = mean_of(xs);
    double ss = 0.0;
    for (double x : xs) ss += (x - m) * (x - m);
    return std::sqrt(ss / static_cast<double>(xs.size()));
}

// Linear-interpolation quantile on an already-sorted vector: the value at
// fractional order-statistic position (n-1)*p.
inline double quantile_sorted(std::span<const double> sorted, double p) {
    if (sorted.empty()) throw std::invalid_argument("quantile_sorted: empty input");
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("quantile_sorted: p outside [0,1]");
    const double h = static_cast<double>(sorted.size() - 1) * p;
    const std::size_t lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = h - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

inline double quantile_of(std::vector<double> xs, double p) {
    std::sort(xs.begin(), xs.end());
    return quantile_sorted(xs, p);
}

}  // namespace driftgate
