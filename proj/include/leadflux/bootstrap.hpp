#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "leadflux/ingest.hpp"

namespace leadflux {

enum class IntervalMethod { Percentile, Basic };

struct BootstrapConfig {
    int replicates = 1000;
    IntervalMethod method = IntervalMethod::Percentile;
    double confidence = 0.90;
    std::uint64_t seed = 0;
    unsigned threads = 1; // results do not depend on this
};

struct IntervalEstimate {
    double point = 0.0;
    double lower = 0.0;
    double upper = 0.0;
    BootstrapConfig config;
    std::vector<double> replicates; // in replicate-index order
};

// Horizon, support cap and historical pickup of a risk query; d comes from the data.
struct BoundTemplate {
    int delta = 0;
    int delta_max = 1;
    double chist_delta = 1.0;
};

// Resamples bookings with replacement inside each cohort independently, rebuilds both
// histograms on `support` and recomputes the divergence. Replicate b draws from
// streams keyed by (seed, b, cohort), so the thread count never changes the output.
IntervalEstimate bootstrap_divergence(std::span<const int> leads_a, std::span<const int> leads_b,
                                      const SupportSpec& support, const BootstrapConfig& config);

// Same replicates mapped through the relative-error bound.
IntervalEstimate bootstrap_bound(std::span<const int> leads_a, std::span<const int> leads_b,
                                 const SupportSpec& support, const BoundTemplate& query,
                                 const BootstrapConfig& config);

// Interval from a replicate sample. Percentile endpoints are the order statistics at
// ranks floor((B + 1) a/2) and ceil((B + 1)(1 - a/2)), clamped to [1, B]; the basic
// interval reflects them about the point estimate and is clipped to [lo_clip, hi_clip].
IntervalEstimate interval_from_replicates(double point, std::vector<double> replicates,
                                          const BootstrapConfig& config, double lo_clip, double hi_clip);

// True iff point > threshold and the interval's lower limit > guardrail.
bool alert(double point, const IntervalEstimate& interval, double threshold, double guardrail);

// CSV: replicate_index, d, bound.
void write_replicates_csv(std::ostream& out, const IntervalEstimate& d, const IntervalEstimate* bound);

} // namespace leadflux
