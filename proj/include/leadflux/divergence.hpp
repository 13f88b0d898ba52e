#pragma once

#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "leadflux/calendar.hpp"
#include "leadflux/distributions.hpp"

namespace leadflux {

enum class BaselineMode { Adjacent, YearOverYear, FixedYear };

std::string to_string(BaselineMode mode);

struct DivergenceValue {
    double d = 0.0;
    YearMonth month;
    YearMonth baseline_month;
    GroupKey group_key;
};

struct DivergenceSeries {
    GroupKey group_key;
    BaselineMode mode = BaselineMode::Adjacent;
    int baseline_year = 0; // FixedYear only
    std::vector<DivergenceValue> values;

    std::vector<double> d_values() const;
};

enum class SupportPolicy {
    UnionExtend, // bring both histograms onto a common partition first
    Strict       // throw SupportMismatch unless supports are identical
};

// Half the L1 distance between two mass vectors of equal length.
double l1_divergence(std::span<const double> a, std::span<const double> b);

// Normalized L1 (total variation) divergence of `a` from baseline `b`. Under
// UnionExtend, uncensored supports are zero-extended to the larger delta_max, and if
// either side is censored both are folded onto the smallest censored delta_max.
DivergenceValue l1_divergence(const LeadTimeHistogram& a, const LeadTimeHistogram& b,
                              SupportPolicy policy = SupportPolicy::UnionExtend);

// Common partition used by UnionExtend.
SupportSpec common_support(const SupportSpec& a, const SupportSpec& b);

// Series builders take histograms for any number of groups. Groups that cannot
// satisfy the mode's requirement are omitted; when no group can, the mode's error is
// thrown. Missing months never get bridged.
std::vector<DivergenceSeries> adjacent_divergence_series(std::span<const LeadTimeHistogram> hists);
std::vector<DivergenceSeries> yoy_divergence_series(std::span<const LeadTimeHistogram> hists);
std::vector<DivergenceSeries> fixed_baseline_divergence_series(std::span<const LeadTimeHistogram> hists,
                                                               int baseline_year);

// Linear interpolation between order statistics (type 7). Requires non-empty input.
double quantile(std::vector<double> values, double prob);

// Quantile of all d values pooled over `series`, or `fallback` when there are none.
double safe_divergence_quantile(std::span<const DivergenceSeries> series, double prob, double fallback);
double safe_divergence_quantile(const DivergenceSeries& series, double prob, double fallback);

enum class EstimateSource { YearOverYear, Adjacent, Default, Override };

std::string to_string(EstimateSource s);

struct DivergenceEstimate {
    double d = 0.0;
    EstimateSource source = EstimateSource::Default;
};

// Reference divergence for risk mapping: quantile of the YoY series where any group has
// 13 months of span, else of the adjacent series, else `fallback`.
DivergenceEstimate reference_divergence(std::span<const LeadTimeHistogram> hists, double prob = 0.90,
                                        double fallback = 0.20);
std::map<GroupKey, DivergenceEstimate> reference_divergence_per_group(std::span<const LeadTimeHistogram> hists,
                                                                      double prob = 0.90, double fallback = 0.20);

// CSV: <group cols>, month, baseline_month, mode, d.
void write_divergence_csv(std::ostream& out, std::span<const DivergenceSeries> series,
                          std::span<const std::string> group_cols);

} // namespace leadflux
