#include "driftgate/synthetic.hpp"

#include <string>

#include "driftgate/errors.hpp"
#include "driftgate/rng.hpp"

namespace driftgate {

void validate(const SynthSpec& spec) {
    if (spec.n_periods < 1) throw InputError("SynthSpec: n_periods must be >= 1");
    if (spec.records_per_period < 1)
        throw InputError("SynthSpec: records_per_period must be >= 1");
    if (spec.feature_dim < 1) throw InputError("SynthSpec: feature_dim must be >= 1");
    if (static_cast<int>(spec.prevalence_schedule.size()) != spec.n_periods)
        throw InputError("SynthSpec: prevalence_schedule length must equal n_periods");
    if (static_cast<int>(spec.class_mean_shift.size()) != spec.n_periods)
        throw InputError("SynthSpec: class_mean_shift length must equal n_periods");
    for (double p : spec.prevalence_schedule)
        if (p < 0.0 || p > 1.0)
            throw InputError("SynthSpec: prevalence entries must lie in [0,1]");
}

Dataset generate_synthetic(const SynthSpec& spec) {
    validate(spec);
    std::vector<LabeledRecord> records;
    records.reserve(static_cast<std::size_t>(spec.n_periods) *
                    static_cast<std::size_t>(spec.records_per_period));

    // Zero-padded ids keep lexicographic order equal to generation order.
    const int id_width =
        static_cast<int>(std::to_string(spec.n_periods * spec.records_per_period).size());

    for (int t = 0; t < spec.n_periods; ++t) {
        // Each period gets its own derived stream so that per-period content
        // is independent of every other period's record count.
        Rng rng(mix_seed({spec.seed, static_cast<std::uint64_t>(t)}));
        const double prevalence = spec.prevalence_schedule[static_cast<std::size_t>(t)];
        const double shift = spec.class_mean_shift[static_cast<std::size_t>(t)];
        for (int i = 0; i < spec.records_per_period; ++i) {
            LabeledRecord rec;
            rec.time_step = t + 1;
            const int serial = t * spec.records_per_period + i;
            std::string id = std::to_string(serial);
            rec.tx_id = "s" + std::string(static_cast<std::size_t>(id_width) - id.size(), '0') + id;
            const bool illicit = rng.next_bernoulli(prevalence);
            rec.label = illicit ? Label::Illicit : Label::Licit;
            rec.features.resize(static_cast<std::size_t>(spec.feature_dim));
            for (auto& f : rec.features) f = rng.next_normal() + (illicit ? shift : 0.0);
            records.push_back(std::move(rec));
        }
    }
    return make_dataset(std::move(records));
}

std::vector<double> linear_schedule(double from, double to, int n) {
    if (n < 1) throw InputError("linear_schedule: n must be >= 1");
    std::vector<double> out(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        out[static_cast<std::size_t>(i)] =
            n == 1 ? from : from + (to - from) * static_cast<double>(i) / static_cast<double>(n - 1);
    return out;
}

}  // namespace driftgate
