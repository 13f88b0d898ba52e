// Acceptance suite. Prints one PASS/FAIL line per criterion and exits non-zero when
// any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <fmt/core.h>

#include "leadflux/bootstrap.hpp"
#include "leadflux/distributions.hpp"
#include "leadflux/divergence.hpp"
#include "leadflux/metrics.hpp"
#include "leadflux/report.hpp"
#include "leadflux/risk.hpp"
#include "leadflux/stl.hpp"
#include "leadflux/synth.hpp"
#include "oracles.hpp"
#include "series.hpp"

using namespace leadflux;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::vector<double> random_pmf(std::mt19937_64& gen, std::size_t n, double zero_share = 0.0) {
    std::exponential_distribution<double> e(1.0);
    std::bernoulli_distribution zero(zero_share);
    std::vector<double> p(n);
    double s = 0;
    for (auto& x : p) s += (x = zero(gen) ? 0.0 : e(gen));
    if (s == 0.0) {
        p[0] = 1.0;
        return p;
    }
    for (auto& x : p) x /= s;
    return p;
}

LeadTimeHistogram as_hist(std::vector<double> mass) {
    LeadTimeHistogram h;
    h.support = {static_cast<int>(mass.size()) - 1, false, 0.95};
    h.mass = std::move(mass);
    h.count = 1;
    return h;
}

// --- 1 -------------------------------------------------------------------------------

Outcome bound_golden_rows() {
    struct Row {
        int delta;
        double chist, bound;
    };
    const Row rows[] = {{7, 0.289, 1.086},  {14, 0.478, 0.570}, {21, 0.625, 0.369},
                        {7, 0.276, 1.138},  {14, 0.521, 0.522}, {21, 0.634, 0.364},
                        {7, 0.260, 1.208},  {14, 0.479, 0.568}, {21, 0.611, 0.377}};
    double worst = 0.0;
    for (const auto& r : rows) worst = std::max(worst, std::abs(relative_error_bound({0.1778, r.delta, 60, r.chist}) - r.bound));
    return {worst <= 0.003, fmt::format("9 rows, D=0.1778, max |err| = {:.5f} (tol 0.003)", worst)};
}

// --- 2 -------------------------------------------------------------------------------

Outcome divergence_properties() {
    const auto t0 = Clock::now();
    std::mt19937_64 gen(20240601);
    const int pairs = 2000;
    int failures = 0;
    double worst_shift = 0.0, worst_oracle = 0.0;
    for (int i = 0; i < pairs; ++i) {
        const std::size_t n = 2 + gen() % 90; // support sizes 2..91 cells, delta_max <= 90
        const double zeros = (i % 4) * 0.25;
        auto a = random_pmf(gen, n, zeros), b = random_pmf(gen, n, zeros), c = random_pmf(gen, n);
        const auto ha = as_hist(a), hb = as_hist(b), hc = as_hist(c);
        const double ab = l1_divergence(ha, hb).d, ba = l1_divergence(hb, ha).d;
        const double ac = l1_divergence(ha, hc).d, bc = l1_divergence(hb, hc).d;
        if (ab < 0.0 || ab > 1.0) ++failures;
        if (std::abs(ab - ba) > 1e-12) ++failures;
        if (l1_divergence(ha, ha).d > 1e-12) ++failures;
        if (a != b && ab <= 0.0) ++failures;
        if (ac > ab + bc + 1e-12) ++failures;
        worst_oracle = std::max(worst_oracle, std::abs(ab - oracle::total_variation(a, b)));

        // Move a fraction q of the mass in one cell to another.
        const std::size_t from = gen() % n;
        std::size_t to = gen() % n;
        if (to == from) to = (to + 1) % n;
        const double q = a[from] * std::uniform_real_distribution<double>(0.0, 1.0)(gen);
        auto shifted = a;
        shifted[from] -= q;
        shifted[to] += q;
        worst_shift = std::max(worst_shift, std::abs(l1_divergence(ha, as_hist(shifted)).d - q));
    }
    if (worst_shift > 1e-12) ++failures;
    const double secs = seconds_since(t0);
    return {failures == 0 && secs < 5.0,
            fmt::format("{} pairs, {} violations, mass-shift max err {:.1e}, oracle max err {:.1e}, {:.2f}s", pairs,
                        failures, worst_shift, worst_oracle, secs)};
}

// --- 3 -------------------------------------------------------------------------------

Outcome bound_monotonicity() {
    const auto t0 = Clock::now();
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int violations = 0, checked = 0;
    for (int cfg = 0; cfg < 100; ++cfg) {
        const double d = 0.01 + 0.99 * u(gen);
        const int dmax = 7 + static_cast<int>(gen() % 114);
        auto pmf = random_pmf(gen, static_cast<std::size_t>(dmax) + 1, cfg % 3 ? 0.2 : 0.6);
        std::vector<double> chist(pmf.size());
        std::partial_sum(pmf.begin(), pmf.end(), chist.begin());
        for (auto& c : chist) c = std::min(c, 1.0);
        for (int delta = 0; delta < dmax; ++delta) {
            const auto k = static_cast<std::size_t>(delta);
            if (chist[k] <= 0.0) continue;
            const double here = relative_error_bound({d, delta, dmax, chist[k]});
            const double next = relative_error_bound({d, delta + 1, dmax, chist[k + 1]});
            ++checked;
            if (!(next < here)) ++violations;
        }
        if (relative_error_bound({d, dmax, dmax, chist.back()}) != 0.0) ++violations;
    }
    const double secs = seconds_since(t0);
    return {violations == 0 && secs < 1.0,
            fmt::format("100 configs, {} adjacent steps, {} violations, {:.3f}s", checked, violations, secs)};
}

// --- 4 -------------------------------------------------------------------------------

Outcome stl_additivity_periodicity() {
    const auto t0 = Clock::now();
    std::mt19937_64 gen(48);
    std::normal_distribution<double> z(0.0, 1.0);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    double worst_add = 0.0, worst_per = 0.0;
    for (int s = 0; s < 50; ++s) {
        std::vector<double> season(12), y(48);
        for (auto& v : season) v = 0.05 * u(gen);
        const double level = 0.15 + 0.05 * u(gen), slope = 0.002 * u(gen), noise = 0.005 + 0.02 * (u(gen) + 1);
        for (std::size_t t = 0; t < 48; ++t)
            y[t] = level + slope * static_cast<double>(t) + season[t % 12] + noise * z(gen);
        for (bool robust : {false, true}) {
            auto fit = stl_decompose(y, StlParams::defaults(12, 48, robust));
            for (std::size_t t = 0; t < 48; ++t) {
                worst_add = std::max(worst_add, std::abs(fit.trend[t] + fit.seasonal[t] + fit.remainder[t] - y[t]));
                if (t + 12 < 48) worst_per = std::max(worst_per, std::abs(fit.seasonal[t] - fit.seasonal[t + 12]));
            }
        }
    }

    // Spike of 10x the interquartile range in an otherwise clean series.
    const std::size_t at = 23;
    auto y = fixtures::spike_base(0.03, at);
    auto sorted = y;
    std::sort(sorted.begin(), sorted.end());
    const double spike = 10.0 * (oracle::quantile7(sorted, 0.75) - oracle::quantile7(sorted, 0.25));
    auto clean = stl_decompose(y, StlParams::defaults(12, 48, true));
    y[at] += spike;
    auto fit = stl_decompose(y, StlParams::defaults(12, 48, true));
    auto formula = oracle::bisquare(fit.remainder);
    double min_other = 1.0, trend_shift = 0.0, weight_gap = 0.0;
    for (std::size_t t = 0; t < 48; ++t) {
        weight_gap = std::max(weight_gap, std::abs(formula[t] - fit.robustness_weights[t]));
        if (t == at) continue;
        min_other = std::min(min_other, fit.robustness_weights[t]);
        trend_shift = std::max(trend_shift, std::abs(fit.trend[t] - clean.trend[t]));
    }
    const bool spike_ok = fit.robustness_weights[at] < 0.1 && min_other > 0.9 && trend_shift < 0.1 * spike &&
                          weight_gap < 1e-12;
    const double secs = seconds_since(t0);
    return {worst_add < 1e-9 && worst_per < 1e-9 && spike_ok && secs < 30.0,
            fmt::format("50 series: max additivity err {:.1e}, max periodicity err {:.1e}; spike weight {:.3f}, "
                        "min other weight {:.3f}, trend shift {:.3f} of spike; {:.2f}s",
                        worst_add, worst_per, fit.robustness_weights[at], min_other, trend_shift / spike, secs)};
}

// --- 5 -------------------------------------------------------------------------------

Outcome loess_oracle() {
    const auto t0 = Clock::now();
    std::mt19937_64 gen(55);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0.0;
    for (int s = 0; s < 20; ++s) {
        const std::size_t n = 12 + gen() % 60;
        std::vector<double> x(n), y(n), w;
        if (s % 2 == 0) {
            for (std::size_t i = 0; i < n; ++i) x[i] = static_cast<double>(i + 1);
        } else {
            for (auto& v : x) v = 100.0 * u(gen);
            std::sort(x.begin(), x.end());
        }
        for (std::size_t i = 0; i < n; ++i) y[i] = std::sin(0.2 * x[i]) + 0.3 * u(gen);
        if (s % 3 == 0) {
            w.resize(n);
            for (auto& v : w) v = 0.2 + 0.8 * u(gen);
        }
        const int degree = s % 3;
        const int window = 3 + 2 * static_cast<int>(gen() % (n / 2 + 4)); // sometimes wider than n
        auto fit = loess_smooth(x, y, window, degree, w);
        for (std::size_t i = 0; i < n; ++i)
            worst = std::max(worst, std::abs(fit[i] - oracle::loess_point(x, y, window, degree, w, x[i])));
    }
    const double secs = seconds_since(t0);
    return {worst <= 1e-9 && secs < 5.0, fmt::format("20 series, max |err| = {:.1e} (tol 1e-9), {:.2f}s", worst, secs)};
}

// --- 6 -------------------------------------------------------------------------------

Outcome divergence_band() {
    const auto t0 = Clock::now();
    double lo = 1.0, hi = 0.0;
    bool months_ok = true, band_ok = true;
    for (std::uint64_t seed = 123; seed < 133; ++seed) {
        SyntheticConfig cfg;
        cfg.seed = seed;
        auto p = build_pipeline(generate_synthetic_bookings(cfg), AnalysisOptions{});
        auto series = adjacent_divergence_series(p.hists.histograms);
        if (series.size() != 3) months_ok = false;
        for (const auto& s : series) {
            if (s.values.size() != 23) months_ok = false;
            auto d = s.d_values();
            const double mean = std::accumulate(d.begin(), d.end(), 0.0) / static_cast<double>(d.size());
            lo = std::min(lo, mean);
            hi = std::max(hi, mean);
            if (mean < 0.08 || mean > 0.28) band_ok = false;
        }
    }
    const double secs = seconds_since(t0);
    return {months_ok && band_ok && secs < 60.0,
            fmt::format("10 seeds x 3 properties: months all 23 = {}, means in [{:.4f}, {:.4f}] (band [0.08, 0.28]), "
                        "{:.2f}s",
                        months_ok, lo, hi, secs)};
}

// --- 7 -------------------------------------------------------------------------------

Outcome compression_monotonicity() {
    const auto t0 = Clock::now();
    const double grid[] = {0.0, 0.2, 0.4, 0.6, 0.8, 1.0};
    std::vector<double> avg;
    std::size_t min_n = SIZE_MAX;
    for (double c : grid) {
        double sum = 0;
        for (std::uint64_t seed = 1; seed <= 10; ++seed) {
            SyntheticConfig cfg;
            cfg.compression_level = c;
            cfg.seed = seed;
            cfg.avg_bookings_per_day = 28.0;
            auto recs = generate_synthetic_bookings(cfg);
            min_n = std::min(min_n, recs.size());
            sum += mass_within(recs, 14);
        }
        avg.push_back(sum / 10.0);
    }
    bool mono = min_n >= 50000;
    for (std::size_t i = 1; i < avg.size(); ++i) mono = mono && avg[i] >= avg[i - 1];
    std::string list;
    for (double v : avg) list += fmt::format("{:.4f} ", v);
    const double secs = seconds_since(t0);
    return {mono && secs < 60.0,
            fmt::format("mean mass within 14d over c = 0..1: {}; min n per run {}; {:.2f}s", list, min_n, secs)};
}

// --- 8 -------------------------------------------------------------------------------

// Week-of-lead distribution under the two-component lognormal mixture: lead times are
// rounded and capped at 60 days, week w covers days 7w..7w+6 and the last week absorbs
// everything from 56 on.
std::vector<double> weekly_pmf(const MixtureSpec& m, double w_short) {
    auto cdf = [](double x, double mu, double sigma) {
        if (x <= 0.0) return 0.0;
        return 0.5 * std::erfc(-(std::log(x) - mu) / (sigma * std::numbers::sqrt2));
    };
    auto mix = [&](double x) {
        return w_short * cdf(x, m.short_mu, m.short_sigma) + (1.0 - w_short) * cdf(x, m.long_mu, m.long_sigma);
    };
    std::vector<double> p(9);
    double prev = 0.0;
    for (int w = 0; w < 8; ++w) {
        const double edge = mix(7.0 * w + 6.5);
        p[static_cast<std::size_t>(w)] = edge - prev;
        prev = edge;
    }
    p[8] = 1.0 - prev;
    return p;
}

std::vector<int> weekly_sample(std::mt19937_64& gen, std::size_t n, const MixtureSpec& m, double w_short) {
    std::lognormal_distribution<double> s(m.short_mu, m.short_sigma), l(m.long_mu, m.long_sigma);
    std::bernoulli_distribution pick(w_short);
    std::vector<int> out(n);
    for (auto& x : out) {
        const int lead = std::min(60, static_cast<int>(std::lround(pick(gen) ? s(gen) : l(gen))));
        x = lead / 7;
    }
    return out;
}

Outcome bootstrap_checks() {
    const auto t0 = Clock::now();
    const MixtureSpec mix;
    const double wa = effective_short_weight(0.2, mix.base_short_weight), wb = effective_short_weight(0.8, mix.base_short_weight);
    const SupportSpec weeks{8, false, 0.95};
    const unsigned threads = std::max(2u, std::thread::hardware_concurrency());

    // Determinism and order statistics.
    std::mt19937_64 gen(8080);
    auto a = weekly_sample(gen, 2000, mix, wa), b = weekly_sample(gen, 2000, mix, wb);
    BootstrapConfig cfg;
    cfg.replicates = 500;
    cfg.seed = 42;
    cfg.threads = 1;
    auto serial = bootstrap_divergence(a, b, weeks, cfg);
    auto again = bootstrap_divergence(a, b, weeks, cfg);
    cfg.threads = threads;
    auto parallel = bootstrap_divergence(a, b, weeks, cfg);
    const bool deterministic = serial.replicates == again.replicates && serial.replicates == parallel.replicates &&
                               serial.lower == parallel.lower && serial.upper == parallel.upper;
    auto sorted = serial.replicates;
    std::sort(sorted.begin(), sorted.end());
    const double alpha = 1.0 - cfg.confidence, B = cfg.replicates;
    const auto lo_rank = static_cast<std::size_t>(std::clamp(std::floor((B + 1) * alpha / 2), 1.0, B));
    const auto hi_rank = static_cast<std::size_t>(std::clamp(std::ceil((B + 1) * (1 - alpha / 2)), 1.0, B));
    const bool order_stats = serial.lower == sorted[lo_rank - 1] && serial.upper == sorted[hi_rank - 1];

    // Coverage of the nominal 90% percentile interval.
    const double truth = oracle::total_variation(weekly_pmf(mix, wa), weekly_pmf(mix, wb));
    int covered = 0;
    const int trials = 200;
    for (int t = 0; t < trials; ++t) {
        std::mt19937_64 g(1000 + static_cast<std::uint64_t>(t));
        auto ca = weekly_sample(g, 2000, mix, wa), cb = weekly_sample(g, 2000, mix, wb);
        BootstrapConfig c;
        c.replicates = 500;
        c.seed = static_cast<std::uint64_t>(t);
        c.threads = threads;
        auto iv = bootstrap_divergence(ca, cb, weeks, c);
        if (iv.lower <= truth && truth <= iv.upper) ++covered;
    }
    const double coverage = static_cast<double>(covered) / trials;
    const double secs = seconds_since(t0);
    return {deterministic && order_stats && coverage >= 0.80 && secs < 180.0,
            fmt::format("serial == parallel ({} threads): {}; endpoints are order statistics {} and {}: {}; "
                        "coverage {}/{} = {:.3f} of true d = {:.4f} (n = 2000, B = 500); {:.1f}s",
                        threads, deterministic, lo_rank, hi_rank, order_stats, covered, trials, coverage, truth, secs)};
}

// --- 9 -------------------------------------------------------------------------------

Outcome metrics_oracle() {
    const auto t0 = Clock::now();
    std::mt19937_64 gen(99);
    std::uniform_real_distribution<double> u(-20.0, 120.0), tau(0.01, 0.99);
    double worst = 0.0, worst_half = 0.0;
    for (int i = 0; i < 100; ++i) {
        const std::size_t n = 1 + gen() % 50;
        std::vector<double> a(n), f(n), ins(n + 24);
        for (auto& v : a) v = u(gen);
        for (auto& v : f) v = u(gen);
        for (auto& v : ins) v = u(gen);
        const double t = tau(gen);
        const int m = i % 2 ? 12 : 1;
        worst = std::max(worst, std::abs(mase(a, f, ins, m) - oracle::mase(a, f, ins, m)));
        worst = std::max(worst, std::abs(smape(a, f).value - oracle::smape(a, f)));
        worst = std::max(worst, std::abs(pinball(a, f, t) - oracle::pinball(a, f, t)));
        worst_half = std::max(worst_half, std::abs(pinball(a, f, 0.5) - 0.5 * oracle::mae(a, f)));
    }
    const double secs = seconds_since(t0);
    return {worst <= 1e-12 && worst_half <= 1e-12 && secs < 1.0,
            fmt::format("100 vectors, max |err| = {:.1e}, pinball(0.5) vs MAE/2 max |err| = {:.1e}, {:.3f}s", worst,
                        worst_half, secs)};
}

// --- 10 ------------------------------------------------------------------------------

std::uint64_t fnv1a(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) h = (h ^ c) * 1099511628211ull;
    return h;
}

std::map<std::string, std::uint64_t> hash_tree(const fs::path& root) {
    std::map<std::string, std::uint64_t> out;
    for (const auto& e : fs::recursive_directory_iterator(root)) {
        if (!e.is_regular_file()) continue;
        std::ifstream in(e.path(), std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        out[fs::relative(e.path(), root).generic_string()] = fnv1a(ss.str());
    }
    return out;
}

Outcome end_to_end() {
    const fs::path base = fs::temp_directory_path() / "leadflux_acceptance";
    fs::remove_all(base);
    fs::create_directories(base);
    const std::string cli = LEADFLUX_CLI_PATH;
    std::vector<std::map<std::string, std::uint64_t>> runs;
    double slowest = 0.0;
    for (int i = 0; i < 2; ++i) {
        const auto out = base / fmt::format("run{}", i);
        const auto t0 = Clock::now();
        const std::string cmd = fmt::format("\"{}\" simulate | \"{}\" report --input - --out \"{}\" > /dev/null 2>&1", cli, cli,
                                            out.string());
        if (std::system(cmd.c_str()) != 0) return {false, "pipeline exited non-zero"};
        slowest = std::max(slowest, seconds_since(t0));
        runs.push_back(hash_tree(out));
    }
    const std::vector<std::string> required = {
        "tables/tbl3_divergence_summary.csv", "tables/tbl2_risk_latest_month.csv", "figures/fig1_adjacent_divergence.svg",
        "figures/fig2_pickup_curve.svg",      "figures/fig3_leadtime_histogram.svg", "series/histograms.csv",
        "series/pickup.csv",                  "series/divergence_adjacent.csv",    "series/divergence_yoy.csv",
        "series/stl.csv"};
    std::size_t missing = 0;
    for (const auto& f : required) missing += runs[0].count(f) == 0;
    const bool identical = runs[0] == runs[1];
    fs::remove_all(base);
    return {missing == 0 && identical && slowest < 30.0,
            fmt::format("{} files, {} required missing, identical hashes across runs: {}, slowest run {:.2f}s",
                        runs[0].size(), missing, identical, slowest)};
}

} // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"bound golden rows", bound_golden_rows},
        {"divergence metric properties", divergence_properties},
        {"bound monotonicity", bound_monotonicity},
        {"stl additivity, periodicity, spike", stl_additivity_periodicity},
        {"loess oracle equivalence", loess_oracle},
        {"synthetic divergence band", divergence_band},
        {"compression monotonicity", compression_monotonicity},
        {"bootstrap determinism and coverage", bootstrap_checks},
        {"metrics oracle equivalence", metrics_oracle},
        {"end-to-end artifacts", end_to_end},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("threw: ") + e.what()};
        }
        failed += !o.pass;
        fmt::print("{:>2} {} {:<36} {}\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first, o.detail);
        std::fflush(stdout);
    }
    fmt::print("{} of {} criteria passed\n", criteria.size() - static_cast<std::size_t>(failed), criteria.size());
    return failed == 0 ? 0 : 1;
}
