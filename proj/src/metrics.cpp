#include "leadflux/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "leadflux/csv.hpp"
#include "leadflux/error.hpp"

namespace leadflux {

namespace {

void same_length(std::span<const double> a, std::span<const double> f) {
    if (a.size() != f.size()) throw InvalidConfig("actual and forecast differ in length");
    if (a.empty()) throw EmptyInput("no evaluation pairs");
}

} // namespace

double mase(std::span<const double> actual, std::span<const double> forecast, std::span<const double> insample,
            int seasonal_period) {
    same_length(actual, forecast);
    if (seasonal_period < 1) throw InvalidConfig("seasonal period must be positive");
    const auto m = static_cast<std::size_t>(seasonal_period);
    if (insample.size() <= m) throw InvalidConfig("in-sample series must be longer than the seasonal period");

    double scale = 0.0;
    for (std::size_t t = m; t < insample.size(); ++t) scale += std::abs(insample[t] - insample[t - m]);
    scale /= static_cast<double>(insample.size() - m);
    if (scale == 0.0) throw ZeroScale("seasonal-naive in-sample MAE is zero");

    double mae = 0.0;
    for (std::size_t i = 0; i < actual.size(); ++i) mae += std::abs(forecast[i] - actual[i]);
    mae /= static_cast<double>(actual.size());
    return mae / scale;
}

SmapeResult smape(std::span<const double> actual, std::span<const double> forecast) {
    same_length(actual, forecast);
    SmapeResult r;
    double sum = 0.0;
    std::size_t used = 0;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        const double denom = std::abs(actual[i]) + std::abs(forecast[i]);
        if (denom == 0.0) {
            ++r.skipped;
            continue;
        }
        sum += 2.0 * std::abs(forecast[i] - actual[i]) / denom;
        ++used;
    }
    if (used == 0) throw AllPairsDegenerate("sMAPE undefined: every pair is zero");
    r.value = sum / static_cast<double>(used);
    return r;
}

double pinball(std::span<const double> actual, std::span<const double> quantile_forecast, double tau) {
    same_length(actual, quantile_forecast);
    if (!(tau > 0.0 && tau < 1.0)) throw InvalidConfig("tau must lie in (0, 1)");
    double s = 0.0;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        const double diff = actual[i] - quantile_forecast[i];
        s += diff >= 0.0 ? tau * diff : (tau - 1.0) * diff;
    }
    return s / static_cast<double>(actual.size());
}

std::vector<HorizonBucket> default_buckets() { return {{"0-7", 0, 7}, {"8-14", 8, 14}, {"15-21", 15, 21}}; }

std::vector<MetricRow> metrics_by_horizon(std::span<const EvaluationPoint> points,
                                          std::span<const HorizonBucket> buckets, const MetricsOptions& options) {
    for (std::size_t i = 0; i < buckets.size(); ++i) {
        if (buckets[i].lo_days > buckets[i].hi_days) throw InvalidConfig("bucket '" + buckets[i].label + "' has lo > hi");
        for (std::size_t j = 0; j < i; ++j)
            if (buckets[i].lo_days <= buckets[j].hi_days && buckets[j].lo_days <= buckets[i].hi_days)
                throw OverlappingBuckets("buckets '" + buckets[j].label + "' and '" + buckets[i].label + "' overlap");
    }

    std::map<GroupKey, std::vector<const EvaluationPoint*>> groups;
    for (const auto& p : points) groups[p.group_key].push_back(&p);

    std::vector<MetricRow> rows;
    for (const auto& [key, pts] : groups) {
        for (const auto& bucket : buckets) {
            std::vector<double> a, f, qa, q;
            for (const auto* p : pts) {
                if (p->horizon_days < bucket.lo_days || p->horizon_days > bucket.hi_days) continue;
                a.push_back(p->actual);
                f.push_back(p->forecast);
                if (p->quantile_forecast) {
                    qa.push_back(p->actual);
                    q.push_back(*p->quantile_forecast);
                }
            }
            if (a.empty()) continue;
            if (auto it = options.insample.find(key); it != options.insample.end())
                rows.push_back({key, bucket.label, "mase", mase(a, f, it->second, options.seasonal_period), a.size()});
            try {
                auto s = smape(a, f);
                rows.push_back({key, bucket.label, "smape", s.value, a.size() - s.skipped});
            } catch (const AllPairsDegenerate&) {
            }
            if (!q.empty()) rows.push_back({key, bucket.label, "pinball", pinball(qa, q, options.tau), q.size()});
        }
    }
    return rows;
}

void write_metrics_csv(std::ostream& out, std::span<const MetricRow> rows, std::span<const std::string> group_cols) {
    std::vector<std::string> header(group_cols.begin(), group_cols.end());
    for (const char* c : {"bucket", "metric", "value", "n_pairs"}) header.emplace_back(c);
    csv::write_row(out, header);
    for (const auto& r : rows) {
        std::vector<std::string> row(r.group_key.begin(), r.group_key.end());
        row.push_back(r.bucket);
        row.push_back(r.metric);
        row.push_back(csv::shortest(r.value));
        row.push_back(std::to_string(r.n_pairs));
        csv::write_row(out, row);
    }
}

} // namespace leadflux
