// Seeded synthetic dataset generator: a two-Gaussian mixture per period with
// a configurable prevalence schedule and class-mean drift. Small enough for
// property tests, expressive enough to mimic declining-prevalence regimes.
#pragma once

#include <cstdint>
#include <vector>

#include "driftgate/dataset.hpp"

namespace driftgate {

struct SynthSpec {
    int n_periods = 0;
    int records_per_period = 0;
    int feature_dim = 1;
    // Per-period illicit probability, length n_periods, entries in [0,1].
    std::vector<double> prevalence_schedule;
    // Per-period scalar shift: illicit features ~ N(shift[t] * 1, I),
    // licit features ~ N(0, I). Length n_periods.
    std::vector<double> class_mean_shift;
    std::uint64_t seed = 0;
};

void validate(const SynthSpec& spec);

// Deterministic under seed: identical specs yield byte-identical datasets.
Dataset generate_synthetic(const SynthSpec& spec);

// Evenly spaced schedule from `from` to `to` over n periods (n >= 1).
std::vector<double> linear_schedule(double from, double to, int n);

}  // namespace driftgate
