#include "leadflux/report.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <set>

#include <fmt/format.h>

#include "leadflux/csv.hpp"
#include "leadflux/error.hpp"
#include "leadflux/random.hpp"
#include "leadflux/svg.hpp"

namespace fs = std::filesystem;

namespace leadflux {

namespace {

std::uint64_t key_hash(const GroupKey& key) {
    std::uint64_t h = 0xcbf29ce484222325ULL; // FNV-1a
    for (const auto& part : key) {
        for (unsigned char c : part) h = (h ^ c) * 0x100000001b3ULL;
        h = (h ^ 0x1f) * 0x100000001b3ULL;
    }
    return h;
}

// Tracks the files of one report run and deletes them unless the run commits.
class ArtifactSet {
public:
    explicit ArtifactSet(fs::path root) : root_(std::move(root)) {}
    ArtifactSet(const ArtifactSet&) = delete;
    ArtifactSet& operator=(const ArtifactSet&) = delete;
    ~ArtifactSet() {
        if (committed_) return;
        std::error_code ec;
        for (const auto& f : files_) fs::remove(root_ / f, ec);
        for (const auto& d : created_dirs_) fs::remove(d, ec); // only succeeds when empty
    }

    template <typename Fn>
    void write(const fs::path& rel, Fn&& fill) {
        const fs::path full = root_ / rel;
        for (fs::path dir = full.parent_path(); !dir.empty() && !fs::exists(dir); dir = dir.parent_path())
            created_dirs_.insert(created_dirs_.begin(), dir);
        fs::create_directories(full.parent_path());
        std::ofstream out(full, std::ios::binary | std::ios::trunc);
        if (!out) throw ValidationError("cannot write " + full.string());
        files_.push_back(rel);
        fill(out);
        if (!out) throw ValidationError("write failed for " + full.string());
    }

    void commit() { committed_ = true; }
    const std::vector<fs::path>& files() const { return files_; }

private:
    fs::path root_;
    std::vector<fs::path> files_;
    std::vector<fs::path> created_dirs_;
    bool committed_ = false;
};

std::string stage_error(const std::string& stage, const std::exception& e) { return stage + ": " + e.what(); }

// Rethrows with the stage name prefixed, preserving the exit-code category.
template <typename Fn>
auto staged(const std::string& stage, Fn&& fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (const ValidationError& e) {
        throw ValidationError(stage_error(stage, e));
    } catch (const ComputationError& e) {
        throw ComputationError(stage_error(stage, e));
    }
}

} // namespace

Pipeline build_pipeline(const std::vector<BookingRecord>& records, const AnalysisOptions& options) {
    Pipeline p;
    p.leads = compute_lead_times(records, options.group_cols, {options.exclude_cancelled});
    if (p.leads.dropped_negative)
        p.notes.push_back(fmt::format("dropped {} bookings with negative lead time", p.leads.dropped_negative));
    if (p.leads.dropped_cancelled)
        p.notes.push_back(fmt::format("excluded {} cancelled bookings", p.leads.dropped_cancelled));
    if (p.leads.leads.empty()) throw EmptyInput("no bookings with a nonnegative lead time");

    p.hists = options.global_support
                  ? leadtime_histograms(p.leads.leads,
                                        select_support(p.leads.leads, options.coverage, options.max_lead_days))
                  : leadtime_histograms_per_group(p.leads.leads, options.coverage, options.max_lead_days);
    if (p.hists.clamped)
        p.notes.push_back(fmt::format("warning: {} leads clamped to delta_max without a censored bin", p.hists.clamped));
    p.curves = pickup_curves(p.hists.histograms);
    return p;
}

RiskRun run_risk(const Pipeline& p, const AnalysisOptions& options, const PolicyTable& policy) {
    RiskRun run;
    const auto& hists = p.hists.histograms;
    if (options.d_override) {
        if (!(*options.d_override >= 0.0 && *options.d_override <= 1.0))
            throw InvalidConfig("divergence override must lie in [0, 1]");
        run.pooled = {*options.d_override, EstimateSource::Override};
    } else {
        run.pooled = reference_divergence(hists, options.quantile_prob, options.default_d);
        if (options.per_group_d) run.per_group = reference_divergence_per_group(hists, options.quantile_prob, options.default_d);
    }

    auto describe = [&](const DivergenceEstimate& e) -> std::string {
        switch (e.source) {
        case EstimateSource::YearOverYear: return fmt::format("P{:g} of year-over-year divergence", 100 * options.quantile_prob);
        case EstimateSource::Adjacent:
            return fmt::format("P{:g} of adjacent-month divergence (year-over-year needs 13 months; fallback used)",
                               100 * options.quantile_prob);
        case EstimateSource::Default: return fmt::format("default D {:g} (no divergence series available)", options.default_d);
        case EstimateSource::Override: return "user override";
        }
        return "";
    };
    if (run.per_group.empty()) {
        run.notes.push_back(fmt::format("D estimate (pooled) = {}: {}", csv::fixed(run.pooled.d), describe(run.pooled)));
        run.rows = risk_report(p.curves, run.pooled.d, options.horizons, policy);
    } else {
        for (const auto& [key, e] : run.per_group)
            run.notes.push_back(fmt::format("D estimate for {} = {}: {}", join_key(key), csv::fixed(e.d), describe(e)));
        run.rows = risk_report(
            p.curves, [&](const GroupKey& k) { return run.per_group.at(k).d; }, options.horizons, policy);
    }
    for (const auto& r : run.rows)
        if (r.zero_pickup())
            run.notes.push_back(fmt::format("no pickup at {} days for {} {}; bound undefined", r.delta, join_key(r.group_key),
                                            r.month.str()));
    return run;
}

std::vector<StlRun> run_stl(std::span<const DivergenceSeries> series, const AnalysisOptions& options,
                            std::vector<std::string>& notes) {
    std::vector<StlRun> out;
    for (const auto& s : series) {
        const std::string name = fmt::format("{} {} series", join_key(s.group_key), to_string(s.mode));
        if (s.values.empty()) {
            notes.push_back("stl skipped for " + name + ": empty");
            continue;
        }
        StlRun run;
        run.group_key = s.group_key;
        run.mode = s.mode;
        const int first = s.values.front().month.index(), last = s.values.back().month.index();
        bool gaps = static_cast<int>(s.values.size()) != last - first + 1;
        if (gaps && !options.interpolate_gaps) {
            notes.push_back("stl skipped for " + name + ": missing months (enable interpolation to fill them)");
            continue;
        }
        std::size_t v = 0;
        for (int idx = first; idx <= last; ++idx) {
            run.months.push_back(YearMonth::from_index(idx));
            if (s.values[v].month.index() == idx) {
                run.observed.push_back(s.values[v++].d);
                continue;
            }
            // Linear interpolation between the neighbouring observed months.
            const auto& prev = s.values[v - 1];
            const auto& next = s.values[v];
            const double frac = static_cast<double>(idx - prev.month.index()) / (next.month.index() - prev.month.index());
            run.observed.push_back(prev.d + frac * (next.d - prev.d));
        }
        if (gaps) notes.push_back("warning: interpolated missing months in " + name + " before stl");
        try {
            run.fit = stl_decompose(run.observed, StlParams::defaults(12, run.observed.size(), options.robust_stl));
        } catch (const SeriesTooShort&) {
            notes.push_back(fmt::format("stl skipped for {}: {} months, at least 24 required", name, run.observed.size()));
            continue;
        }
        out.push_back(std::move(run));
    }
    return out;
}

std::vector<BootstrapRow> run_bootstrap(const Pipeline& p, const BootstrapOptions& options,
                                        std::vector<std::string>& notes) {
    if (options.mode == BaselineMode::FixedYear) throw InvalidConfig("bootstrap supports adjacent and yoy baselines");
    const int lag = options.mode == BaselineMode::Adjacent ? 1 : 12;

    std::map<std::pair<GroupKey, YearMonth>, std::vector<int>> cohorts;
    for (const auto& l : p.leads.leads)
        for (std::int64_t w = 0; w < l.weight; ++w) cohorts[{l.group_key, l.arrival_month}].push_back(l.lead_days);

    std::map<GroupKey, const LeadTimeHistogram*> latest;
    for (const auto& h : p.hists.histograms) {
        auto& slot = latest[h.group_key];
        if (!slot || slot->month < h.month) slot = &h;
    }
    std::vector<BootstrapRow> rows;
    for (const auto& [key, hist] : latest) {
        const YearMonth base = hist->month.plus(-lag);
        auto a = cohorts.find({key, hist->month});
        auto b = cohorts.find({key, base});
        if (b == cohorts.end()) {
            notes.push_back(fmt::format("bootstrap skipped for {}: no baseline month {}", join_key(key), base.str()));
            continue;
        }
        BootstrapConfig cfg = options.config;
        cfg.seed = splitmix64(options.config.seed ^ key_hash(key));

        BootstrapRow row;
        row.group_key = key;
        row.month = hist->month;
        row.baseline_month = base;
        row.delta = options.delta;
        row.d = bootstrap_divergence(a->second, b->second, hist->support, cfg);
        const auto curve = pickup_curve(*hist);
        if (options.delta < 0 || options.delta > curve.delta_max())
            throw InvalidConfig(fmt::format("horizon {} outside [0, {}]", options.delta, curve.delta_max()));
        const double chist = curve.chist[static_cast<std::size_t>(options.delta)];
        if (chist > 0.0)
            row.bound = bootstrap_bound(a->second, b->second, hist->support, {options.delta, curve.delta_max(), chist}, cfg);
        else
            notes.push_back(fmt::format("no pickup at {} days for {}; bound interval omitted", options.delta, join_key(key)));
        row.alert = alert(row.d.point, row.d, options.threshold, options.guardrail);
        rows.push_back(std::move(row));
    }
    return rows;
}

void write_bootstrap_csv(std::ostream& out, std::span<const BootstrapRow> rows, std::span<const std::string> group_cols) {
    std::vector<std::string> header(group_cols.begin(), group_cols.end());
    for (const char* c : {"month", "baseline_month", "method", "confidence", "replicates", "d", "d_lower", "d_upper",
                          "delta_days", "bound", "bound_lower", "bound_upper", "alert"})
        header.emplace_back(c);
    csv::write_row(out, header);
    for (const auto& r : rows) {
        std::vector<std::string> row(r.group_key.begin(), r.group_key.end());
        row.push_back(r.month.str());
        row.push_back(r.baseline_month.str());
        row.push_back(r.d.config.method == IntervalMethod::Percentile ? "percentile" : "basic");
        row.push_back(csv::shortest(r.d.config.confidence));
        row.push_back(std::to_string(r.d.config.replicates));
        row.push_back(csv::shortest(r.d.point));
        row.push_back(csv::shortest(r.d.lower));
        row.push_back(csv::shortest(r.d.upper));
        row.push_back(std::to_string(r.delta));
        if (r.bound) {
            row.push_back(csv::shortest(r.bound->point));
            row.push_back(csv::shortest(r.bound->lower));
            row.push_back(csv::shortest(r.bound->upper));
        } else {
            for (int i = 0; i < 3; ++i) row.emplace_back("NA");
        }
        row.push_back(r.alert ? "true" : "false");
        csv::write_row(out, row);
    }
}

ReportResult run_report(const std::vector<BookingRecord>& records, const AnalysisOptions& options,
                        const PolicyTable& policy, const fs::path& out_dir) {
    ReportResult result;
    ArtifactSet art(out_dir);
    auto& notes = result.notes;
    const auto& cols = options.group_cols;

    Pipeline p = staged("histograms", [&] { return build_pipeline(records, options); });
    notes.insert(notes.end(), p.notes.begin(), p.notes.end());
    const auto& hists = p.hists.histograms;

    art.write("series/histograms.csv", [&](std::ostream& o) { write_histograms_csv(o, hists, cols); });
    art.write("series/pickup.csv", [&](std::ostream& o) { write_pickup_csv(o, p.curves, cols); });

    std::vector<DivergenceSeries> adjacent, yoy, fixed;
    staged("divergence", [&] {
        try {
            adjacent = adjacent_divergence_series(hists);
        } catch (const InsufficientMonths& e) {
            notes.push_back(std::string("adjacent divergence skipped: ") + e.what());
        }
        try {
            yoy = yoy_divergence_series(hists);
        } catch (const InsufficientMonths& e) {
            notes.push_back(std::string("year-over-year divergence skipped: ") + e.what());
        }
        if (options.baseline_year) {
            try {
                fixed = fixed_baseline_divergence_series(hists, *options.baseline_year);
            } catch (const NoBaselineData& e) {
                notes.push_back(std::string("fixed-year divergence skipped: ") + e.what());
            }
        }
    });
    if (!adjacent.empty())
        art.write("series/divergence_adjacent.csv", [&](std::ostream& o) { write_divergence_csv(o, adjacent, cols); });
    if (!yoy.empty()) art.write("series/divergence_yoy.csv", [&](std::ostream& o) { write_divergence_csv(o, yoy, cols); });
    if (!fixed.empty())
        art.write(fmt::format("series/divergence_fixed_{}.csv", *options.baseline_year),
                  [&](std::ostream& o) { write_divergence_csv(o, fixed, cols); });

    art.write("tables/tbl3_divergence_summary.csv", [&](std::ostream& o) {
        csv::write_row(o, {"Property", "Months", "Mean D", "Median D", "P90 D"});
        for (const auto& s : adjacent) {
            auto d = s.d_values();
            if (d.empty()) continue;
            const double mean = std::accumulate(d.begin(), d.end(), 0.0) / static_cast<double>(d.size());
            csv::write_row(o, {join_key(s.group_key), std::to_string(d.size()), csv::fixed(mean),
                               csv::fixed(quantile(d, 0.5)), csv::fixed(quantile(d, 0.9))});
        }
    });

    std::vector<DivergenceSeries> stl_input;
    if (options.stl_series == "adjacent" || options.stl_series == "both")
        stl_input.insert(stl_input.end(), adjacent.begin(), adjacent.end());
    if (options.stl_series == "yoy" || options.stl_series == "both") stl_input.insert(stl_input.end(), yoy.begin(), yoy.end());
    auto stl_runs = staged("stl", [&] { return run_stl(stl_input, options, notes); });
    art.write("series/stl.csv", [&](std::ostream& o) {
        std::vector<std::string> header(cols.begin(), cols.end());
        for (const char* c : {"mode", "month", "observed", "trend", "seasonal", "remainder", "weight"})
            header.emplace_back(c);
        csv::write_row(o, header);
        for (const auto& r : stl_runs)
            for (std::size_t t = 0; t < r.observed.size(); ++t) {
                std::vector<std::string> row(r.group_key.begin(), r.group_key.end());
                row.push_back(to_string(r.mode));
                row.push_back(r.months[t].str());
                for (double v : {r.observed[t], r.fit.trend[t], r.fit.seasonal[t], r.fit.remainder[t],
                                 r.fit.robustness_weights[t]})
                    row.push_back(csv::shortest(v));
                csv::write_row(o, row);
            }
    });

    result.risk = staged("risk", [&] { return run_risk(p, options, policy); });
    notes.insert(notes.end(), result.risk.notes.begin(), result.risk.notes.end());
    art.write("tables/tbl2_risk_latest_month.csv", [&](std::ostream& o) { write_risk_csv(o, result.risk.rows, cols); });

    // Figures 2 and 3 show the latest cohort of the first group.
    const LeadTimeHistogram* focus = nullptr;
    for (const auto& h : hists)
        if (h.group_key == hists.front().group_key) focus = &h;
    const std::string focus_name = join_key(focus->group_key);

    art.write("figures/fig1_adjacent_divergence.svg", [&](std::ostream& o) {
        std::vector<svg::LineSeries> lines;
        for (const auto& s : adjacent) {
            svg::LineSeries l{join_key(s.group_key), {}, {}};
            for (const auto& v : s.values) {
                l.months.push_back(v.month);
                l.values.push_back(v.d);
            }
            lines.push_back(std::move(l));
        }
        svg::line_chart_monthly(o, "Adjacent-month divergence D(L_t, L_t-1)", "D", lines);
    });
    art.write("figures/fig2_pickup_curve.svg", [&](std::ostream& o) {
        svg::step_chart(o, fmt::format("Cumulative pickup C_hist, {} {}", focus_name, focus->month.str()),
                        "Days before arrival", "C_hist", pickup_curve(*focus).chist);
    });
    art.write("figures/fig3_leadtime_histogram.svg", [&](std::ostream& o) {
        std::vector<std::string> cats;
        for (int k = 0; k <= focus->support.delta_max; ++k) cats.push_back(std::to_string(k));
        if (focus->support.censored_bin) cats.push_back(std::to_string(focus->support.delta_max) + "+");
        svg::bar_chart(o, fmt::format("Lead-time distribution L_t(k), {} {}", focus_name, focus->month.str()),
                       "Lead time k (days)", "L_t(k)", cats, focus->mass);
    });

    art.write("summary.txt", [&](std::ostream& o) {
        o << "Lead-time divergence summary\n\n";
        std::set<GroupKey> groups;
        for (const auto& h : hists) groups.insert(h.group_key);
        o << fmt::format("Groups: {}; cohorts: {}; bookings: {}\n", groups.size(), hists.size(), p.leads.leads.size());
        for (const auto& s : adjacent) {
            auto d = s.d_values();
            if (d.empty()) continue;
            o << fmt::format("  {}: adjacent D over {} months, latest {} = {}\n", join_key(s.group_key), d.size(),
                             s.values.back().month.str(), csv::fixed(d.back(), 3));
        }
        o << "\nRisk index at standard horizons (latest month):\n";
        for (const auto& r : result.risk.rows) {
            if (r.assessment)
                o << fmt::format("  {} {} delta={:>2} C_hist={} bound={} -> {} pricing, AP buffer {} d, staffing +{}%\n",
                                 join_key(r.group_key), r.month.str(), r.delta, csv::fixed(r.chist, 3),
                                 csv::fixed(r.assessment->bound, 3), to_string(r.assessment->actions.price_cadence),
                                 r.assessment->actions.ap_buffer_days, r.assessment->actions.staffing_buffer_pct);
            else
                o << fmt::format("  {} {} delta={:>2} C_hist=0 bound undefined\n", join_key(r.group_key), r.month.str(),
                                 r.delta);
        }
        if (!notes.empty()) {
            o << "\nNotes:\n";
            for (const auto& n : notes) o << "  - " << n << '\n';
        }
    });

    art.commit();
    result.files = art.files();
    return result;
}

} // namespace leadflux
