#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "leadflux/calendar.hpp"
#include "leadflux/ingest.hpp"

namespace leadflux {

// Discrete lead-time distribution of one (group, arrival month) cohort. mass[k] holds
// the share of bookings with lead time k for k = 0..delta_max; when the support has a
// censored bin, mass.back() holds the share beyond delta_max.
struct LeadTimeHistogram {
    GroupKey group_key;
    YearMonth month;
    SupportSpec support;
    std::vector<double> mass;
    std::int64_t count = 0;

    double censored_mass() const { return support.censored_bin ? mass.back() : 0.0; }
};

struct PickupCurve {
    GroupKey group_key;
    YearMonth month;
    std::vector<double> chist; // chist[delta], delta = 0..delta_max

    int delta_max() const { return static_cast<int>(chist.size()) - 1; }
};

struct HistogramSet {
    std::vector<LeadTimeHistogram> histograms; // sorted by (group_key, month)
    std::size_t clamped = 0;                   // leads folded into delta_max without a censored bin
};

// Cell index for a lead under `support`; leads past delta_max go to the censored cell,
// or to delta_max itself when there is none.
inline std::size_t cell_of(int lead_days, const SupportSpec& support) {
    if (lead_days <= support.delta_max) return static_cast<std::size_t>(lead_days);
    return static_cast<std::size_t>(support.delta_max) + (support.censored_bin ? 1 : 0);
}

// One histogram per observed (group, month), all sharing `support`.
HistogramSet leadtime_histograms(std::span<const LeadTimeRecord> leads, const SupportSpec& support);

// Same, but each group gets its own support from select_support over that group's leads.
HistogramSet leadtime_histograms_per_group(std::span<const LeadTimeRecord> leads, double coverage_target,
                                           std::optional<int> user_cap);

// Histogram of a bare vector of lead times (used by resampling code).
LeadTimeHistogram histogram_from_leads(std::span<const int> leads, const SupportSpec& support);

// Re-expresses a histogram on another partition. Cells at or below `delta_max` are kept
// (zero-extended if needed); everything beyond folds into the censored cell, which must
// exist in the target when any mass lies past delta_max.
LeadTimeHistogram reproject(const LeadTimeHistogram& h, const SupportSpec& target);

PickupCurve pickup_curve(const LeadTimeHistogram& hist);
std::vector<PickupCurve> pickup_curves(std::span<const LeadTimeHistogram> hists);

struct TailBin {
    int lo = 0;
    int hi = 0; // inclusive
    double mass = 0.0;
};

// Daily cells up to the cutoff, weekly cells beyond it, and the untouched censored cell.
struct CoarsenedHistogram {
    std::vector<TailBin> bins;
    std::optional<double> censored;

    double total_mass() const;
    // Cumulative mass at each bin's upper edge.
    std::vector<double> cumulative() const;
};

CoarsenedHistogram coarsen_tail_weekly(const LeadTimeHistogram& hist, int cutoff_days = 28);

// CSV: <group cols>, month, k, mass, count. The censored cell is written with k = "<delta_max>+".
void write_histograms_csv(std::ostream& out, std::span<const LeadTimeHistogram> hists,
                          std::span<const std::string> group_cols);
// CSV: <group cols>, month, delta, chist.
void write_pickup_csv(std::ostream& out, std::span<const PickupCurve> curves,
                      std::span<const std::string> group_cols);

// Histogram CSV reader, the inverse of write_histograms_csv.
std::vector<LeadTimeHistogram> read_histograms_csv(std::istream& in, std::span<const std::string> group_cols);

} // namespace leadflux
