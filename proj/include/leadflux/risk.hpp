#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "leadflux/calendar.hpp"
#include "leadflux/distributions.hpp"

namespace leadflux {

struct RiskQuery {
    double d = 0.0;        // divergence between historical and actual lead-time distributions
    int delta = 0;         // days before arrival
    int delta_max = 1;     // support cap
    double chist_delta = 1.0; // historical pickup fraction at delta
};

// Upper bound on the relative error of a pickup forecast made `delta` days out:
// 2 d (1 - delta / delta_max) / chist_delta. Throws ZeroPickup when chist_delta is 0.
double relative_error_bound(const RiskQuery& q);

enum class PriceCadence { Weekly, Daily, Intraday };

std::string to_string(PriceCadence c);
std::optional<PriceCadence> parse_cadence(std::string_view s);

struct ActionSet {
    PriceCadence price_cadence = PriceCadence::Weekly;
    int ap_buffer_days = 0;
    double staffing_buffer_pct = 0.0;

    bool operator==(const ActionSet&) const = default;
};

struct PolicyTier {
    double threshold = 0.0; // tier applies when bound >= threshold
    ActionSet actions;
};

class PolicyTable {
public:
    // Throws InvalidPolicy unless thresholds are strictly increasing and non-empty.
    explicit PolicyTable(std::vector<PolicyTier> tiers);

    // bound < 0.15 -> weekly/0/0%, [0.15, 0.30) -> daily/3/5%, >= 0.30 -> intraday/0/15%.
    static PolicyTable standard();

    // CSV with header threshold,price_cadence,ap_buffer_days,staffing_buffer_pct.
    static PolicyTable from_csv(std::istream& in);

    const std::vector<PolicyTier>& tiers() const { return tiers_; }

private:
    std::vector<PolicyTier> tiers_;
};

// Highest tier whose threshold is <= bound; the lowest tier when bound is below all.
ActionSet recommend_actions(double bound, const PolicyTable& policy = PolicyTable::standard());

struct RiskAssessment {
    double bound = 0.0;
    RiskQuery query;
    ActionSet actions;
};

RiskAssessment assess(const RiskQuery& q, const PolicyTable& policy = PolicyTable::standard());

struct RiskRow {
    GroupKey group_key;
    YearMonth month;
    int delta = 0;
    int delta_max = 0;
    double d = 0.0;
    double chist = 0.0;
    std::optional<RiskAssessment> assessment; // empty when the pickup at delta is zero
    bool zero_pickup() const { return !assessment.has_value(); }
};

// Bound and actions at each horizon for the latest month of every group. `d_for`
// supplies the divergence estimate used for a group.
std::vector<RiskRow> risk_report(std::span<const PickupCurve> curves,
                                 const std::function<double(const GroupKey&)>& d_for,
                                 std::span<const int> horizons = std::vector<int>{7, 14, 21},
                                 const PolicyTable& policy = PolicyTable::standard());

std::vector<RiskRow> risk_report(std::span<const PickupCurve> curves, double d_est,
                                 std::span<const int> horizons = std::vector<int>{7, 14, 21},
                                 const PolicyTable& policy = PolicyTable::standard());

// CSV: <group cols>, month, delta_days, chist, bound, price_cadence, ap_buffer_days,
// staffing_buffer_pct. Zero-pickup rows carry "NA" in the bound and action columns.
void write_risk_csv(std::ostream& out, std::span<const RiskRow> rows, std::span<const std::string> group_cols);

} // namespace leadflux
