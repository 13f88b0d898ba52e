#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "leadflux/bootstrap.hpp"
#include "leadflux/distributions.hpp"
#include "leadflux/divergence.hpp"
#include "leadflux/ingest.hpp"
#include "leadflux/risk.hpp"
#include "leadflux/stl.hpp"

namespace leadflux {

// Options shared by every analysis subcommand.
struct AnalysisOptions {
    std::vector<std::string> group_cols = {"property_id"};
    double coverage = 0.95;
    std::optional<int> max_lead_days;  // cap on the selected delta_max
    bool global_support = false;       // one support for all groups instead of one per group
    bool exclude_cancelled = false;
    double quantile_prob = 0.90;
    double default_d = 0.20;
    bool per_group_d = false;          // per-group reference divergence instead of pooled
    std::optional<double> d_override;
    std::vector<int> horizons = {7, 14, 21};
    std::optional<int> baseline_year;  // adds a fixed-year divergence series
    bool robust_stl = true;
    bool interpolate_gaps = false;     // fill missing months linearly before STL
    std::string stl_series = "both";   // adjacent | yoy | both
};

// Ingested leads and the histograms and pickup curves built from them.
struct Pipeline {
    LeadTimeResult leads;
    HistogramSet hists;
    std::vector<PickupCurve> curves;
    std::vector<std::string> notes;
};

Pipeline build_pipeline(const std::vector<BookingRecord>& records, const AnalysisOptions& options);

struct RiskRun {
    std::vector<RiskRow> rows;
    DivergenceEstimate pooled;
    std::map<GroupKey, DivergenceEstimate> per_group;
    std::vector<std::string> notes;
};

// D estimate (override, else YoY quantile, else adjacent quantile, else default), then
// the bound and actions at each horizon for every group's latest month.
RiskRun run_risk(const Pipeline& p, const AnalysisOptions& options, const PolicyTable& policy);

struct StlRun {
    GroupKey group_key;
    BaselineMode mode;
    std::vector<YearMonth> months;
    std::vector<double> observed;
    StlResult fit;
};

// Decomposes each group's divergence series, skipping series that are too short or
// have gaps (unless interpolation is on); skips are recorded in `notes`.
std::vector<StlRun> run_stl(std::span<const DivergenceSeries> series, const AnalysisOptions& options,
                            std::vector<std::string>& notes);

struct BootstrapRow {
    GroupKey group_key;
    YearMonth month;
    YearMonth baseline_month;
    IntervalEstimate d;
    std::optional<IntervalEstimate> bound; // empty when the pickup at the horizon is zero
    int delta = 0;
    bool alert = false;
};

struct BootstrapOptions {
    BaselineMode mode = BaselineMode::Adjacent;
    int delta = 14;
    double threshold = 0.20;
    double guardrail = 0.15;
    BootstrapConfig config;
};

// Bootstraps each group's latest month against its baseline month.
std::vector<BootstrapRow> run_bootstrap(const Pipeline& p, const BootstrapOptions& options,
                                        std::vector<std::string>& notes);

void write_bootstrap_csv(std::ostream& out, std::span<const BootstrapRow> rows, std::span<const std::string> group_cols);

struct ReportResult {
    std::vector<std::filesystem::path> files; // relative to the output directory, in write order
    std::vector<std::string> notes;
    RiskRun risk;
};

// Writes the full artifact directory:
//   tables/tbl3_divergence_summary.csv   tables/tbl2_risk_latest_month.csv
//   series/{histograms,pickup,divergence_*,stl}.csv
//   figures/fig1_adjacent_divergence.svg fig2_pickup_curve.svg fig3_leadtime_histogram.svg
//   summary.txt
// Files written by a failing run are removed before the error propagates.
ReportResult run_report(const std::vector<BookingRecord>& records, const AnalysisOptions& options,
                        const PolicyTable& policy, const std::filesystem::path& out_dir);

} // namespace leadflux
