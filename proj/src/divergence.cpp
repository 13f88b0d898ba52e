#include "leadflux/divergence.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>

#include "leadflux/csv.hpp"
#include "leadflux/error.hpp"

namespace leadflux {

namespace {

using MonthMap = std::map<YearMonth, const LeadTimeHistogram*>;

std::map<GroupKey, MonthMap> by_group(std::span<const LeadTimeHistogram> hists) {
    std::map<GroupKey, MonthMap> out;
    for (const auto& h : hists) out[h.group_key][h.month] = &h;
    return out;
}

template <typename BaselineOf>
DivergenceSeries build_series(const GroupKey& key, const MonthMap& months, BaselineMode mode, BaselineOf baseline_of) {
    DivergenceSeries s;
    s.group_key = key;
    s.mode = mode;
    for (const auto& [month, hist] : months) {
        auto base = baseline_of(month);
        if (!base) continue;
        auto it = months.find(*base);
        if (it == months.end()) continue;
        s.values.push_back(l1_divergence(*hist, *it->second));
    }
    return s;
}

} // namespace

std::string to_string(BaselineMode mode) {
    switch (mode) {
    case BaselineMode::Adjacent: return "adjacent";
    case BaselineMode::YearOverYear: return "yoy";
    case BaselineMode::FixedYear: return "fixed_year";
    }
    return "?";
}

std::string to_string(EstimateSource s) {
    switch (s) {
    case EstimateSource::YearOverYear: return "yoy";
    case EstimateSource::Adjacent: return "adjacent";
    case EstimateSource::Default: return "default";
    case EstimateSource::Override: return "override";
    }
    return "?";
}

std::vector<double> DivergenceSeries::d_values() const {
    std::vector<double> out;
    out.reserve(values.size());
    for (const auto& v : values) out.push_back(v.d);
    return out;
}

double l1_divergence(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw SupportMismatch("mass vectors differ in length");
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += std::abs(a[k] - b[k]);
    return std::min(0.5 * s, 1.0);
}

SupportSpec common_support(const SupportSpec& a, const SupportSpec& b) {
    SupportSpec out;
    out.coverage_target = a.coverage_target;
    if (!a.censored_bin && !b.censored_bin) {
        out.delta_max = std::max(a.delta_max, b.delta_max);
        out.censored_bin = false;
    } else {
        out.censored_bin = true;
        if (a.censored_bin && b.censored_bin) out.delta_max = std::min(a.delta_max, b.delta_max);
        else out.delta_max = a.censored_bin ? a.delta_max : b.delta_max;
    }
    return out;
}

DivergenceValue l1_divergence(const LeadTimeHistogram& a, const LeadTimeHistogram& b, SupportPolicy policy) {
    DivergenceValue v;
    v.month = a.month;
    v.baseline_month = b.month;
    v.group_key = a.group_key;
    if (a.support == b.support) {
        v.d = l1_divergence(a.mass, b.mass);
        return v;
    }
    if (policy == SupportPolicy::Strict)
        throw SupportMismatch("histograms for " + a.month.str() + " and " + b.month.str() + " have different supports");
    auto target = common_support(a.support, b.support);
    v.d = l1_divergence(reproject(a, target).mass, reproject(b, target).mass);
    return v;
}

std::vector<DivergenceSeries> adjacent_divergence_series(std::span<const LeadTimeHistogram> hists) {
    std::vector<DivergenceSeries> out;
    for (const auto& [key, months] : by_group(hists)) {
        if (months.size() < 2) continue;
        out.push_back(build_series(key, months, BaselineMode::Adjacent,
                                   [](YearMonth m) { return std::optional<YearMonth>(m.plus(-1)); }));
    }
    if (out.empty()) throw InsufficientMonths("adjacent divergence needs at least 2 months in some group");
    return out;
}

std::vector<DivergenceSeries> yoy_divergence_series(std::span<const LeadTimeHistogram> hists) {
    std::vector<DivergenceSeries> out;
    for (const auto& [key, months] : by_group(hists)) {
        int span = months.rbegin()->first.index() - months.begin()->first.index() + 1;
        if (span < 13) continue;
        out.push_back(build_series(key, months, BaselineMode::YearOverYear,
                                   [](YearMonth m) { return std::optional<YearMonth>(m.plus(-12)); }));
    }
    if (out.empty()) throw InsufficientMonths("year-over-year divergence needs a span of at least 13 months");
    return out;
}

std::vector<DivergenceSeries> fixed_baseline_divergence_series(std::span<const LeadTimeHistogram> hists,
                                                               int baseline_year) {
    std::vector<DivergenceSeries> out;
    for (const auto& [key, months] : by_group(hists)) {
        bool has_baseline = std::any_of(months.begin(), months.end(),
                                        [&](const auto& kv) { return kv.first.year == baseline_year; });
        if (!has_baseline) continue;
        auto s = build_series(key, months, BaselineMode::FixedYear, [&](YearMonth m) -> std::optional<YearMonth> {
            if (m.year == baseline_year) return std::nullopt;
            return YearMonth{baseline_year, m.month};
        });
        s.baseline_year = baseline_year;
        out.push_back(std::move(s));
    }
    if (out.empty()) throw NoBaselineData("no histograms for baseline year " + std::to_string(baseline_year));
    return out;
}

double quantile(std::vector<double> values, double prob) {
    if (values.empty()) throw EmptyInput("quantile of an empty sample");
    if (!(prob >= 0.0 && prob <= 1.0)) throw InvalidConfig("quantile probability must lie in [0, 1]");
    std::sort(values.begin(), values.end());
    double h = (static_cast<double>(values.size()) - 1.0) * prob;
    auto lo = static_cast<std::size_t>(std::floor(h));
    auto hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

double safe_divergence_quantile(std::span<const DivergenceSeries> series, double prob, double fallback) {
    std::vector<double> pooled;
    for (const auto& s : series)
        for (const auto& v : s.values) pooled.push_back(v.d);
    if (pooled.empty()) return fallback;
    return quantile(std::move(pooled), prob);
}

double safe_divergence_quantile(const DivergenceSeries& series, double prob, double fallback) {
    return safe_divergence_quantile(std::span<const DivergenceSeries>(&series, 1), prob, fallback);
}

namespace {

DivergenceEstimate estimate_from(std::span<const LeadTimeHistogram> hists, double prob, double fallback) {
    try {
        auto yoy = yoy_divergence_series(hists);
        bool any = std::any_of(yoy.begin(), yoy.end(), [](const auto& s) { return !s.values.empty(); });
        if (any) return {safe_divergence_quantile(yoy, prob, fallback), EstimateSource::YearOverYear};
    } catch (const InsufficientMonths&) {
    }
    try {
        auto adj = adjacent_divergence_series(hists);
        bool any = std::any_of(adj.begin(), adj.end(), [](const auto& s) { return !s.values.empty(); });
        if (any) return {safe_divergence_quantile(adj, prob, fallback), EstimateSource::Adjacent};
    } catch (const InsufficientMonths&) {
    }
    return {fallback, EstimateSource::Default};
}

} // namespace

DivergenceEstimate reference_divergence(std::span<const LeadTimeHistogram> hists, double prob, double fallback) {
    return estimate_from(hists, prob, fallback);
}

std::map<GroupKey, DivergenceEstimate> reference_divergence_per_group(std::span<const LeadTimeHistogram> hists,
                                                                      double prob, double fallback) {
    std::map<GroupKey, std::vector<LeadTimeHistogram>> groups;
    for (const auto& h : hists) groups[h.group_key].push_back(h);
    std::map<GroupKey, DivergenceEstimate> out;
    for (const auto& [key, g] : groups) out[key] = estimate_from(g, prob, fallback);
    return out;
}

void write_divergence_csv(std::ostream& out, std::span<const DivergenceSeries> series,
                          std::span<const std::string> group_cols) {
    std::vector<std::string> header(group_cols.begin(), group_cols.end());
    for (const char* c : {"month", "baseline_month", "mode", "d"}) header.emplace_back(c);
    csv::write_row(out, header);
    for (const auto& s : series) {
        for (const auto& v : s.values) {
            std::vector<std::string> row(v.group_key.begin(), v.group_key.end());
            row.push_back(v.month.str());
            row.push_back(v.baseline_month.str());
            row.push_back(to_string(s.mode));
            row.push_back(csv::shortest(v.d));
            csv::write_row(out, row);
        }
    }
}

} // namespace leadflux
