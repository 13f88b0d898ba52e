// leadflux: command-line front end for lead-time divergence monitoring.
//
// Exit codes: 0 success, 2 input or validation error, 3 computation error.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "leadflux/csv.hpp"
#include "leadflux/error.hpp"
#include "leadflux/metrics.hpp"
#include "leadflux/report.hpp"
#include "leadflux/synth.hpp"

using namespace leadflux;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitComputation = 3;

struct SimFlags {
    std::string start = "2021-01-01";
    std::string end = "2022-12-31";
    double per_day = 20.0;
    int properties = 3;
    int max_lead = 60;
    double compression = 0.4;
    std::uint64_t seed = 123;
    double segment_sd = 0.15;
    double cancel_prob = 0.1;
    std::vector<double> seasonality;
    std::vector<std::string> event_weeks;
};

struct InputFlags {
    std::string input;
    bool simulate = false;
    bool skip_bad_rows = false;
    std::string group_cols = "property_id";
    std::string policy_path;
};

struct Flags {
    SimFlags sim;
    InputFlags in;
    AnalysisOptions analysis;
    std::string horizons = "7,14,21";
    std::string output = "-";
    std::string out_dir = "paper_artifacts";
    std::string mode = "adjacent";
    std::string stl_mode = "both";
    std::optional<int> baseline_year;
    std::optional<double> d_override;
    BootstrapOptions boot;
    std::string method = "percentile";
    std::string dump_dir;
    // metrics
    std::string insample_path;
    int seasonal_period = 1;
    double tau = 0.5;
    std::string buckets = "0-7,8-14,15-21";
};

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) {
        auto t = csv::trim(item);
        if (!t.empty()) out.emplace_back(t);
    }
    return out;
}

SyntheticConfig sim_config(const SimFlags& f) {
    SyntheticConfig c;
    auto start = parse_date(f.start), end = parse_date(f.end);
    if (!start || !end) throw InvalidConfig("--start/--end must be YYYY-MM-DD dates");
    c.start_date = *start;
    c.end_date = *end;
    c.avg_bookings_per_day = f.per_day;
    c.properties = f.properties;
    c.max_lead_days = f.max_lead;
    c.compression_level = f.compression;
    c.seed = f.seed;
    c.segment_effect_sd = f.segment_sd;
    c.cancel_probability = f.cancel_prob;
    if (!f.seasonality.empty()) {
        if (f.seasonality.size() != 12) throw InvalidConfig("--seasonality needs exactly 12 multipliers");
        std::copy(f.seasonality.begin(), f.seasonality.end(), c.seasonality.begin());
    }
    for (const auto& e : f.event_weeks) {
        auto parts = split(e, ':');
        auto d = parts.size() == 2 ? parse_date(parts[0]) : std::nullopt;
        auto m = parts.size() == 2 ? csv::parse_double(parts[1]) : std::nullopt;
        if (!d || !m) throw InvalidConfig("--event-week expects YYYY-MM-DD:MULTIPLIER, got '" + e + "'");
        c.event_weeks.push_back({*d, *m});
    }
    validate(c);
    return c;
}

std::vector<BookingRecord> load_records(const Flags& f) {
    if (f.in.simulate == !f.in.input.empty())
        throw InvalidConfig("give exactly one of --input or --simulate");
    if (f.in.simulate) return generate_synthetic_bookings(sim_config(f.sim));
    ParseOptions opts;
    opts.policy = f.in.skip_bad_rows ? RowErrorPolicy::SkipAndCount : RowErrorPolicy::FailFast;
    ParseResult parsed;
    if (f.in.input == "-") {
        parsed = parse_bookings(std::cin, opts);
    } else {
        std::ifstream in(f.in.input, std::ios::binary);
        if (!in) throw ValidationError("cannot open " + f.in.input);
        parsed = parse_bookings(in, opts);
    }
    if (!parsed.rejected.empty()) {
        std::cerr << fmt::format("skipped {} malformed rows", parsed.rejected.size());
        const auto& first = parsed.rejected.front();
        std::cerr << fmt::format(" (first: line {}, field '{}': {})\n", first.line, first.field, first.message);
    }
    return parsed.records;
}

PolicyTable load_policy(const Flags& f) {
    if (f.in.policy_path.empty()) return PolicyTable::standard();
    std::ifstream in(f.in.policy_path);
    if (!in) throw ValidationError("cannot open policy file " + f.in.policy_path);
    return PolicyTable::from_csv(in);
}

AnalysisOptions analysis_options(const Flags& f) {
    AnalysisOptions o = f.analysis;
    o.group_cols = split(f.in.group_cols, ',');
    o.horizons.clear();
    for (const auto& h : split(f.horizons, ',')) {
        auto v = csv::parse_int(h);
        if (!v) throw InvalidConfig("bad horizon '" + h + "'");
        o.horizons.push_back(static_cast<int>(*v));
    }
    o.baseline_year = f.baseline_year;
    o.d_override = f.d_override;
    o.stl_series = f.stl_mode;
    return o;
}

// Runs `fn` with an output stream bound to --output (stdout for "-").
template <typename Fn>
void with_output(const std::string& path, Fn&& fn) {
    if (path == "-") {
        fn(std::cout);
        return;
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ValidationError("cannot write " + path);
    fn(out);
}

void add_input_flags(CLI::App* cmd, Flags& f) {
    cmd->add_option("-i,--input", f.in.input, "Bookings CSV (use - for stdin)");
    cmd->add_flag("--simulate", f.in.simulate, "Generate synthetic bookings instead of reading --input");
    cmd->add_flag("--skip-bad-rows", f.in.skip_bad_rows, "Skip and count malformed rows instead of failing");
    cmd->add_option("--group-cols", f.in.group_cols, "Comma-separated grouping columns")->join(',')->capture_default_str();
    cmd->add_option("--coverage", f.analysis.coverage, "Mass that [0, delta_max] must cover")->capture_default_str();
    cmd->add_option("--max-lead-days", f.analysis.max_lead_days, "Cap on delta_max");
    cmd->add_flag("--global-support", f.analysis.global_support, "Choose one delta_max for all groups");
    cmd->add_flag("--exclude-cancelled", f.analysis.exclude_cancelled, "Drop cancelled bookings");
}

void add_sim_flags(CLI::App* cmd, SimFlags& s) {
    cmd->add_option("--start", s.start, "First arrival date")->capture_default_str();
    cmd->add_option("--end", s.end, "Last arrival date")->capture_default_str();
    cmd->add_option("--per-day", s.per_day, "Mean bookings per property and day")->capture_default_str();
    cmd->add_option("--properties", s.properties, "Number of properties")->capture_default_str();
    cmd->add_option("--max-lead", s.max_lead, "Largest simulated lead time")->capture_default_str();
    cmd->add_option("--compression", s.compression, "Compression level c in [0, 1]")->capture_default_str();
    cmd->add_option("--seed", s.seed, "Random seed")->capture_default_str();
    cmd->add_option("--segment-sd", s.segment_sd, "SD of segment demand effects")->capture_default_str();
    cmd->add_option("--cancel-prob", s.cancel_prob, "Probability a booking is flagged cancelled")->capture_default_str();
    cmd->add_option("--seasonality", s.seasonality, "Twelve monthly demand multipliers")->expected(12);
    cmd->add_option("--event-week", s.event_weeks, "Event week as YYYY-MM-DD:MULTIPLIER (repeatable)");
}

void add_d_flags(CLI::App* cmd, Flags& f) {
    cmd->add_option("--quantile", f.analysis.quantile_prob, "Quantile of the divergence series used as D")
        ->capture_default_str();
    cmd->add_option("--default-d", f.analysis.default_d, "D used when no divergence series exists")->capture_default_str();
    cmd->add_flag("--per-group-d", f.analysis.per_group_d, "Estimate D per group instead of pooled");
    cmd->add_option("--d", f.d_override, "Use this D instead of estimating it");
    cmd->add_option("--horizons", f.horizons, "Comma-separated horizons in days")->join(',')->capture_default_str();
    cmd->add_option("--policy", f.in.policy_path, "Policy CSV: threshold,price_cadence,ap_buffer_days,staffing_buffer_pct");
}

BaselineMode parse_mode(const std::string& m) {
    if (m == "adjacent") return BaselineMode::Adjacent;
    if (m == "yoy") return BaselineMode::YearOverYear;
    if (m == "fixed") return BaselineMode::FixedYear;
    throw InvalidConfig("unknown baseline mode '" + m + "'");
}

std::vector<DivergenceSeries> divergence_for(const Pipeline& p, BaselineMode mode, std::optional<int> year) {
    switch (mode) {
    case BaselineMode::Adjacent: return adjacent_divergence_series(p.hists.histograms);
    case BaselineMode::YearOverYear: return yoy_divergence_series(p.hists.histograms);
    case BaselineMode::FixedYear:
        if (!year) throw InvalidConfig("--mode fixed requires --baseline-year");
        return fixed_baseline_divergence_series(p.hists.histograms, *year);
    }
    return {};
}

void print_notes(const std::vector<std::string>& notes) {
    for (const auto& n : notes) std::cerr << "note: " << n << '\n';
}

std::vector<EvaluationPoint> read_evaluation(std::istream& in, std::size_t n_group) {
    csv::Reader reader(in);
    csv::Row row;
    if (!reader.next(row)) throw EmptyInput("evaluation CSV is empty");
    if (row.fields.size() < n_group + 3) throw MissingColumn("horizon_days,actual,forecast");
    const bool has_q = row.fields.size() >= n_group + 4;
    std::vector<EvaluationPoint> pts;
    while (reader.next(row)) {
        if (row.fields.size() < n_group + 3) throw RowParseError(row.line, "actual", "too few fields");
        EvaluationPoint p;
        p.group_key.assign(row.fields.begin(), row.fields.begin() + static_cast<std::ptrdiff_t>(n_group));
        auto h = csv::parse_int(row.fields[n_group]);
        auto a = csv::parse_double(row.fields[n_group + 1]);
        auto fc = csv::parse_double(row.fields[n_group + 2]);
        if (!h) throw RowParseError(row.line, "horizon_days", "not an integer");
        if (!a) throw RowParseError(row.line, "actual", "not a number");
        if (!fc) throw RowParseError(row.line, "forecast", "not a number");
        p.horizon_days = static_cast<int>(*h);
        p.actual = *a;
        p.forecast = *fc;
        if (has_q && row.fields.size() > n_group + 3 && !csv::trim(row.fields[n_group + 3]).empty()) {
            auto q = csv::parse_double(row.fields[n_group + 3]);
            if (!q) throw RowParseError(row.line, "quantile_forecast", "not a number");
            p.quantile_forecast = *q;
        }
        pts.push_back(std::move(p));
    }
    return pts;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Lead-time distribution drift monitoring and pickup risk bounds"};
    app.set_config("--config", "", "Key-value configuration file overriding defaults");
    app.require_subcommand(1);
    Flags f;

    auto* simulate = app.add_subcommand("simulate", "Write synthetic bookings as CSV");
    add_sim_flags(simulate, f.sim);
    simulate->add_option("-o,--output", f.output, "Output file (- for stdout)")->capture_default_str();

    auto* histograms = app.add_subcommand("histograms", "Lead-time histograms and pickup curves per group and month");
    add_input_flags(histograms, f);
    add_sim_flags(histograms, f.sim);
    histograms->add_option("-o,--output", f.output, "Histogram CSV (- for stdout)")->capture_default_str();
    std::string pickup_out;
    histograms->add_option("--pickup-output", pickup_out, "Also write pickup curves to this CSV");

    auto* divergence = app.add_subcommand("divergence", "Monthly divergence series");
    add_input_flags(divergence, f);
    add_sim_flags(divergence, f.sim);
    divergence->add_option("--mode", f.mode, "adjacent, yoy or fixed")->capture_default_str();
    divergence->add_option("--baseline-year", f.baseline_year, "Baseline year for --mode fixed");
    divergence->add_option("-o,--output", f.output, "Divergence CSV (- for stdout)")->capture_default_str();

    auto* stl = app.add_subcommand("stl", "Seasonal-trend decomposition of divergence series");
    add_input_flags(stl, f);
    add_sim_flags(stl, f.sim);
    stl->add_option("--mode", f.mode, "adjacent, yoy or fixed")->capture_default_str();
    stl->add_option("--baseline-year", f.baseline_year, "Baseline year for --mode fixed");
    stl->add_flag("!--no-robust", f.analysis.robust_stl, "Disable robustness iterations");
    stl->add_flag("--interpolate", f.analysis.interpolate_gaps, "Fill missing months linearly");
    stl->add_option("-o,--output", f.output, "STL CSV (- for stdout)")->capture_default_str();

    auto* risk = app.add_subcommand("risk", "Pickup risk bound and actions for the latest month");
    add_input_flags(risk, f);
    add_sim_flags(risk, f.sim);
    add_d_flags(risk, f);
    risk->add_option("-o,--output", f.output, "Risk CSV (- for stdout)")->capture_default_str();

    auto* boot = app.add_subcommand("bootstrap", "Bootstrap intervals for the latest month's divergence and bound");
    add_input_flags(boot, f);
    add_sim_flags(boot, f.sim);
    boot->add_option("--mode", f.mode, "adjacent or yoy")->capture_default_str();
    boot->add_option("--replicates,-B", f.boot.config.replicates, "Bootstrap replicates")->capture_default_str();
    boot->add_option("--method", f.method, "percentile or basic")->capture_default_str();
    boot->add_option("--confidence", f.boot.config.confidence, "Interval confidence")->capture_default_str();
    boot->add_option("--boot-seed", f.boot.config.seed, "Bootstrap seed")->capture_default_str();
    boot->add_option("--threads", f.boot.config.threads, "Worker threads")->capture_default_str();
    boot->add_option("--delta", f.boot.delta, "Horizon for the bound interval")->capture_default_str();
    boot->add_option("--threshold", f.boot.threshold, "Alert threshold on D")->capture_default_str();
    boot->add_option("--guardrail", f.boot.guardrail, "Alert guardrail on the lower limit")->capture_default_str();
    boot->add_option("--dump-dir", f.dump_dir, "Write per-group replicate CSVs here");
    boot->add_option("-o,--output", f.output, "Interval CSV (- for stdout)")->capture_default_str();

    auto* report = app.add_subcommand("report", "Write the full artifact directory");
    add_input_flags(report, f);
    add_sim_flags(report, f.sim);
    add_d_flags(report, f);
    report->add_option("--baseline-year", f.baseline_year, "Also compute a fixed-year divergence series");
    report->add_option("--stl-series", f.stl_mode, "adjacent, yoy or both")->capture_default_str();
    report->add_flag("!--no-robust", f.analysis.robust_stl, "Disable STL robustness iterations");
    report->add_flag("--interpolate", f.analysis.interpolate_gaps, "Fill missing months linearly before STL");
    report->add_option("--out", f.out_dir, "Artifact directory")->envname("LEADFLUX_OUT_DIR")->capture_default_str();

    auto* metrics = app.add_subcommand("metrics", "MASE, sMAPE and pinball loss by horizon bucket");
    metrics->add_option("-i,--input", f.in.input, "CSV: <group cols>,horizon_days,actual,forecast[,quantile_forecast]")
        ->required();
    metrics->add_option("--group-cols", f.in.group_cols, "Comma-separated grouping columns")->join(',')->capture_default_str();
    metrics->add_option("--insample", f.insample_path, "CSV: <group cols>,value (in time order) for MASE scaling");
    metrics->add_option("--seasonal-period", f.seasonal_period, "MASE naive lag")->capture_default_str();
    metrics->add_option("--tau", f.tau, "Quantile level for pinball loss")->capture_default_str();
    metrics->add_option("--buckets", f.buckets, "Comma-separated lo-hi horizon buckets")->join(',')->capture_default_str();
    metrics->add_option("-o,--output", f.output, "Metrics CSV (- for stdout)")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitValidation;
    }

    try {
        if (*simulate) {
            auto records = generate_synthetic_bookings(sim_config(f.sim));
            with_output(f.output, [&](std::ostream& o) { write_bookings(o, records); });
            return 0;
        }
        if (*metrics) {
            auto cols = split(f.in.group_cols, ',');
            std::ifstream in(f.in.input);
            if (!in) throw ValidationError("cannot open " + f.in.input);
            auto points = read_evaluation(in, cols.size());
            MetricsOptions mo;
            mo.tau = f.tau;
            mo.seasonal_period = f.seasonal_period;
            if (!f.insample_path.empty()) {
                std::ifstream ins(f.insample_path);
                if (!ins) throw ValidationError("cannot open " + f.insample_path);
                csv::Reader reader(ins);
                csv::Row row;
                reader.next(row);
                while (reader.next(row)) {
                    if (row.fields.size() != cols.size() + 1) throw RowParseError(row.line, "value", "wrong field count");
                    auto v = csv::parse_double(row.fields.back());
                    if (!v) throw RowParseError(row.line, "value", "not a number");
                    GroupKey key(row.fields.begin(), row.fields.end() - 1);
                    mo.insample[key].push_back(*v);
                }
            }
            std::vector<HorizonBucket> buckets;
            for (const auto& b : split(f.buckets, ',')) {
                auto parts = split(b, '-');
                auto lo = parts.size() == 2 ? csv::parse_int(parts[0]) : std::nullopt;
                auto hi = parts.size() == 2 ? csv::parse_int(parts[1]) : std::nullopt;
                if (!lo || !hi) throw InvalidConfig("bad bucket '" + b + "'");
                buckets.push_back({b, static_cast<int>(*lo), static_cast<int>(*hi)});
            }
            auto rows = metrics_by_horizon(points, buckets, mo);
            with_output(f.output, [&](std::ostream& o) { write_metrics_csv(o, rows, cols); });
            return 0;
        }

        const auto records = load_records(f);
        const auto options = analysis_options(f);

        if (*report) {
            auto result = run_report(records, options, load_policy(f), f.out_dir);
            print_notes(result.notes);
            std::cerr << fmt::format("wrote {} files under {}\n", result.files.size(), f.out_dir);
            return 0;
        }

        const Pipeline p = build_pipeline(records, options);
        print_notes(p.notes);
        const auto& cols = options.group_cols;

        if (*histograms) {
            with_output(f.output, [&](std::ostream& o) { write_histograms_csv(o, p.hists.histograms, cols); });
            if (!pickup_out.empty()) with_output(pickup_out, [&](std::ostream& o) { write_pickup_csv(o, p.curves, cols); });
        } else if (*divergence) {
            auto series = divergence_for(p, parse_mode(f.mode), f.baseline_year);
            with_output(f.output, [&](std::ostream& o) { write_divergence_csv(o, series, cols); });
        } else if (*stl) {
            auto series = divergence_for(p, parse_mode(f.mode), f.baseline_year);
            std::vector<std::string> notes;
            auto runs = run_stl(series, options, notes);
            print_notes(notes);
            if (runs.empty()) throw SeriesTooShort("no series could be decomposed");
            with_output(f.output, [&](std::ostream& o) {
                bool header = true;
                for (const auto& r : runs) {
                    write_stl_csv(o, r.group_key, r.months, r.observed, r.fit, header, cols);
                    header = false;
                }
            });
        } else if (*risk) {
            auto run = run_risk(p, options, load_policy(f));
            print_notes(run.notes);
            with_output(f.output, [&](std::ostream& o) { write_risk_csv(o, run.rows, cols); });
        } else if (*boot) {
            BootstrapOptions bo = f.boot;
            bo.mode = parse_mode(f.mode);
            if (f.method == "percentile") bo.config.method = IntervalMethod::Percentile;
            else if (f.method == "basic") bo.config.method = IntervalMethod::Basic;
            else throw InvalidConfig("unknown interval method '" + f.method + "'");
            std::vector<std::string> notes;
            auto rows = run_bootstrap(p, bo, notes);
            print_notes(notes);
            with_output(f.output, [&](std::ostream& o) { write_bootstrap_csv(o, rows, cols); });
            if (!f.dump_dir.empty()) {
                std::filesystem::create_directories(f.dump_dir);
                for (const auto& r : rows) {
                    auto path = std::filesystem::path(f.dump_dir) / ("replicates_" + join_key(r.group_key, "_") + ".csv");
                    with_output(path.string(), [&](std::ostream& o) {
                        write_replicates_csv(o, r.d, r.bound ? &*r.bound : nullptr);
                    });
                }
            }
        }
        return 0;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const ComputationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitComputation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitComputation;
    }
}
