#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "leadflux/calendar.hpp"

namespace leadflux {

// Mean absolute error scaled by the in-sample MAE of the seasonal-naive forecast at
// lag `seasonal_period`. Throws ZeroScale when that in-sample MAE is zero.
double mase(std::span<const double> actual, std::span<const double> forecast, std::span<const double> insample,
            int seasonal_period = 1);

struct SmapeResult {
    double value = 0.0;     // in [0, 2]
    std::size_t skipped = 0; // pairs with |a| + |f| = 0
};

// Mean of 2 |f - a| / (|a| + |f|). Throws AllPairsDegenerate when every pair is skipped.
SmapeResult smape(std::span<const double> actual, std::span<const double> forecast);

// Mean of tau (a - q) when a >= q, else (1 - tau)(q - a).
double pinball(std::span<const double> actual, std::span<const double> quantile_forecast, double tau);

struct HorizonBucket {
    std::string label;
    int lo_days = 0;
    int hi_days = 0; // inclusive
};

std::vector<HorizonBucket> default_buckets(); // 0-7, 8-14, 15-21

struct EvaluationPoint {
    GroupKey group_key;
    int horizon_days = 0;
    double actual = 0.0;
    double forecast = 0.0;
    std::optional<double> quantile_forecast;
};

struct MetricsOptions {
    double tau = 0.5;
    int seasonal_period = 1;
    // In-sample history per group; MASE is reported only for groups present here.
    std::map<GroupKey, std::vector<double>> insample;
};

struct MetricRow {
    GroupKey group_key;
    std::string bucket;
    std::string metric; // "mase", "smape" or "pinball"
    double value = 0.0;
    std::size_t n_pairs = 0;
};

// Metrics per (group, bucket); buckets without data produce no rows. Throws
// OverlappingBuckets when buckets intersect.
std::vector<MetricRow> metrics_by_horizon(std::span<const EvaluationPoint> points,
                                          std::span<const HorizonBucket> buckets, const MetricsOptions& options = {});

// CSV: <group cols>, bucket, metric, value, n_pairs.
void write_metrics_csv(std::ostream& out, std::span<const MetricRow> rows, std::span<const std::string> group_cols);

} // namespace leadflux
