#include "leadflux/risk.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>

#include <fmt/format.h>

#include "leadflux/csv.hpp"
#include "leadflux/error.hpp"

namespace leadflux {

double relative_error_bound(const RiskQuery& q) {
    if (q.delta_max < 1) throw InvalidConfig("delta_max must be at least 1");
    if (q.delta < 0 || q.delta > q.delta_max)
        throw InvalidConfig(fmt::format("horizon {} outside [0, {}]", q.delta, q.delta_max));
    if (!(q.d >= 0.0 && q.d <= 1.0)) throw InvalidConfig("divergence must lie in [0, 1]");
    if (!(q.chist_delta >= 0.0 && q.chist_delta <= 1.0)) throw InvalidConfig("pickup fraction must lie in [0, 1]");
    if (q.chist_delta == 0.0)
        throw ZeroPickup(fmt::format("no historical pickup at {} days; the bound is undefined", q.delta));
    const double horizon = 1.0 - static_cast<double>(q.delta) / static_cast<double>(q.delta_max);
    return 2.0 * q.d * horizon / q.chist_delta;
}

std::string to_string(PriceCadence c) {
    switch (c) {
    case PriceCadence::Weekly: return "weekly";
    case PriceCadence::Daily: return "daily";
    case PriceCadence::Intraday: return "intraday";
    }
    return "?";
}

std::optional<PriceCadence> parse_cadence(std::string_view s) {
    s = csv::trim(s);
    if (s == "weekly") return PriceCadence::Weekly;
    if (s == "daily") return PriceCadence::Daily;
    if (s == "intraday") return PriceCadence::Intraday;
    return std::nullopt;
}

PolicyTable::PolicyTable(std::vector<PolicyTier> tiers) : tiers_(std::move(tiers)) {
    if (tiers_.empty()) throw InvalidPolicy("policy table has no tiers");
    for (std::size_t i = 0; i < tiers_.size(); ++i) {
        if (!std::isfinite(tiers_[i].threshold)) throw InvalidPolicy("policy thresholds must be finite");
        if (i && !(tiers_[i].threshold > tiers_[i - 1].threshold))
            throw InvalidPolicy("policy thresholds must be strictly increasing");
        if (tiers_[i].actions.ap_buffer_days < 0 || tiers_[i].actions.staffing_buffer_pct < 0.0)
            throw InvalidPolicy("policy buffers must be nonnegative");
    }
}

PolicyTable PolicyTable::standard() {
    return PolicyTable({{0.0, {PriceCadence::Weekly, 0, 0.0}},
                        {0.15, {PriceCadence::Daily, 3, 5.0}},
                        {0.30, {PriceCadence::Intraday, 0, 15.0}}});
}

PolicyTable PolicyTable::from_csv(std::istream& in) {
    csv::Reader reader(in);
    csv::Row row;
    if (!reader.next(row)) throw InvalidPolicy("policy file is empty");
    std::vector<PolicyTier> tiers;
    while (reader.next(row)) {
        if (row.fields.size() == 1 && csv::trim(row.fields[0]).empty()) continue;
        if (row.fields.size() != 4) throw RowParseError(row.line, "threshold", "expected 4 fields");
        auto thr = csv::parse_double(row.fields[0]);
        auto cad = parse_cadence(row.fields[1]);
        auto ap = csv::parse_int(row.fields[2]);
        auto staff = csv::parse_double(row.fields[3]);
        if (!thr) throw RowParseError(row.line, "threshold", "not a number");
        if (!cad) throw RowParseError(row.line, "price_cadence", "expected weekly, daily or intraday");
        if (!ap) throw RowParseError(row.line, "ap_buffer_days", "not an integer");
        if (!staff) throw RowParseError(row.line, "staffing_buffer_pct", "not a number");
        tiers.push_back({*thr, {*cad, static_cast<int>(*ap), *staff}});
    }
    return PolicyTable(std::move(tiers));
}

ActionSet recommend_actions(double bound, const PolicyTable& policy) {
    const auto& tiers = policy.tiers();
    const PolicyTier* chosen = &tiers.front();
    for (const auto& t : tiers)
        if (bound >= t.threshold) chosen = &t;
    return chosen->actions;
}

RiskAssessment assess(const RiskQuery& q, const PolicyTable& policy) {
    RiskAssessment a;
    a.query = q;
    a.bound = relative_error_bound(q);
    a.actions = recommend_actions(a.bound, policy);
    return a;
}

std::vector<RiskRow> risk_report(std::span<const PickupCurve> curves,
                                 const std::function<double(const GroupKey&)>& d_for, std::span<const int> horizons,
                                 const PolicyTable& policy) {
    std::map<GroupKey, const PickupCurve*> latest;
    for (const auto& c : curves) {
        auto& slot = latest[c.group_key];
        if (!slot || slot->month < c.month) slot = &c;
    }
    std::vector<RiskRow> rows;
    for (const auto& [key, curve] : latest) {
        const double d = d_for(key);
        for (int delta : horizons) {
            if (delta < 0 || delta > curve->delta_max())
                throw InvalidConfig(fmt::format("horizon {} outside [0, {}] for group {}", delta, curve->delta_max(),
                                                join_key(key)));
            RiskRow row;
            row.group_key = key;
            row.month = curve->month;
            row.delta = delta;
            row.delta_max = curve->delta_max();
            row.d = d;
            row.chist = curve->chist[static_cast<std::size_t>(delta)];
            try {
                row.assessment = assess({d, delta, row.delta_max, row.chist}, policy);
            } catch (const ZeroPickup&) {
                row.assessment.reset();
            }
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

std::vector<RiskRow> risk_report(std::span<const PickupCurve> curves, double d_est, std::span<const int> horizons,
                                 const PolicyTable& policy) {
    return risk_report(curves, [d_est](const GroupKey&) { return d_est; }, horizons, policy);
}

void write_risk_csv(std::ostream& out, std::span<const RiskRow> rows, std::span<const std::string> group_cols) {
    std::vector<std::string> header(group_cols.begin(), group_cols.end());
    for (const char* c : {"month", "delta_days", "chist", "bound", "price_cadence", "ap_buffer_days",
                          "staffing_buffer_pct"})
        header.emplace_back(c);
    csv::write_row(out, header);
    for (const auto& r : rows) {
        std::vector<std::string> row(r.group_key.begin(), r.group_key.end());
        row.push_back(r.month.str());
        row.push_back(std::to_string(r.delta));
        row.push_back(csv::shortest(r.chist));
        if (r.assessment) {
            row.push_back(csv::shortest(r.assessment->bound));
            row.push_back(to_string(r.assessment->actions.price_cadence));
            row.push_back(std::to_string(r.assessment->actions.ap_buffer_days));
            row.push_back(csv::shortest(r.assessment->actions.staffing_buffer_pct));
        } else {
            for (int i = 0; i < 4; ++i) row.emplace_back("NA");
        }
        csv::write_row(out, row);
    }
}

} // namespace leadflux
