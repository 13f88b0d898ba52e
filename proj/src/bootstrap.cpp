#include "leadflux/bootstrap.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <thread>

#include "leadflux/csv.hpp"
#include "leadflux/distributions.hpp"
#include "leadflux/divergence.hpp"
#include "leadflux/error.hpp"
#include "leadflux/random.hpp"
#include "leadflux/risk.hpp"

namespace leadflux {

namespace {

void validate(const BootstrapConfig& c) {
    if (c.replicates < 2) throw InvalidConfig("bootstrap needs at least 2 replicates");
    if (!(c.confidence > 0.0 && c.confidence < 1.0)) throw InvalidConfig("confidence must lie in (0, 1)");
}

std::vector<std::size_t> cells(std::span<const int> leads, const SupportSpec& support) {
    std::vector<std::size_t> out;
    out.reserve(leads.size());
    for (int l : leads) {
        if (l < 0) throw InvalidConfig("negative lead time in bootstrap cohort");
        out.push_back(cell_of(l, support));
    }
    return out;
}

void resample_mass(Stream& rng, const std::vector<std::size_t>& cell, std::vector<double>& mass) {
    std::fill(mass.begin(), mass.end(), 0.0);
    const std::uint64_t n = cell.size();
    for (std::uint64_t i = 0; i < n; ++i) mass[cell[rng.below(n)]] += 1.0;
    const double inv = 1.0 / static_cast<double>(n);
    for (double& m : mass) m *= inv;
}

std::vector<double> replicate_divergences(std::span<const int> leads_a, std::span<const int> leads_b,
                                          const SupportSpec& support, const BootstrapConfig& config, double& point) {
    if (leads_a.empty() || leads_b.empty()) throw EmptyCohort("bootstrap: both cohorts need at least one booking");
    validate(config);
    point = l1_divergence(histogram_from_leads(leads_a, support).mass, histogram_from_leads(leads_b, support).mass);

    const auto ca = cells(leads_a, support);
    const auto cb = cells(leads_b, support);
    const auto reps = static_cast<std::size_t>(config.replicates);
    std::vector<double> out(reps);

    auto work = [&](std::size_t begin, std::size_t end) {
        std::vector<double> ma(support.cells()), mb(support.cells());
        for (std::size_t b = begin; b < end; ++b) {
            Stream ra(config.seed, {b, 0});
            Stream rb(config.seed, {b, 1});
            resample_mass(ra, ca, ma);
            resample_mass(rb, cb, mb);
            out[b] = l1_divergence(ma, mb);
        }
    };

    const std::size_t threads = std::clamp<std::size_t>(config.threads, 1, reps);
    if (threads == 1) {
        work(0, reps);
    } else {
        std::vector<std::jthread> pool;
        const std::size_t chunk = (reps + threads - 1) / threads;
        for (std::size_t t = 0; t < threads; ++t) {
            std::size_t begin = t * chunk, end = std::min(reps, begin + chunk);
            if (begin < end) pool.emplace_back(work, begin, end);
        }
    }
    return out;
}

} // namespace

IntervalEstimate interval_from_replicates(double point, std::vector<double> replicates, const BootstrapConfig& config,
                                          double lo_clip, double hi_clip) {
    validate(config);
    if (replicates.size() < 2) throw InvalidConfig("interval needs at least 2 replicates");
    IntervalEstimate est;
    est.point = point;
    est.config = config;
    std::vector<double> sorted = replicates;
    std::sort(sorted.begin(), sorted.end());

    const double alpha = 1.0 - config.confidence;
    const auto b = static_cast<double>(sorted.size());
    auto rank = [&](double r) {
        auto i = static_cast<long long>(r);
        return static_cast<std::size_t>(std::clamp<long long>(i, 1, static_cast<long long>(sorted.size())) - 1);
    };
    const double q_lo = sorted[rank(std::floor((b + 1.0) * alpha / 2.0))];
    const double q_hi = sorted[rank(std::ceil((b + 1.0) * (1.0 - alpha / 2.0)))];

    if (config.method == IntervalMethod::Percentile) {
        est.lower = q_lo;
        est.upper = q_hi;
    } else {
        est.lower = std::clamp(2.0 * point - q_hi, lo_clip, hi_clip);
        est.upper = std::clamp(2.0 * point - q_lo, lo_clip, hi_clip);
    }
    est.replicates = std::move(replicates);
    return est;
}

IntervalEstimate bootstrap_divergence(std::span<const int> leads_a, std::span<const int> leads_b,
                                      const SupportSpec& support, const BootstrapConfig& config) {
    double point = 0.0;
    auto reps = replicate_divergences(leads_a, leads_b, support, config, point);
    return interval_from_replicates(point, std::move(reps), config, 0.0, 1.0);
}

IntervalEstimate bootstrap_bound(std::span<const int> leads_a, std::span<const int> leads_b, const SupportSpec& support,
                                 const BoundTemplate& query, const BootstrapConfig& config) {
    auto bound_of = [&](double d) { return relative_error_bound({d, query.delta, query.delta_max, query.chist_delta}); };
    bound_of(0.0); // validates the template, including ZeroPickup
    double point = 0.0;
    auto reps = replicate_divergences(leads_a, leads_b, support, config, point);
    for (double& r : reps) r = bound_of(r);
    return interval_from_replicates(bound_of(point), std::move(reps), config, 0.0,
                                    std::numeric_limits<double>::infinity());
}

bool alert(double point, const IntervalEstimate& interval, double threshold, double guardrail) {
    if (guardrail > threshold) throw InvalidGuardrail("guardrail must not exceed the alert threshold");
    return point > threshold && interval.lower > guardrail;
}

void write_replicates_csv(std::ostream& out, const IntervalEstimate& d, const IntervalEstimate* bound) {
    csv::write_row(out, {"replicate_index", "d", "bound"});
    for (std::size_t b = 0; b < d.replicates.size(); ++b)
        csv::write_row(out, {std::to_string(b + 1), csv::shortest(d.replicates[b]),
                             bound ? csv::shortest(bound->replicates.at(b)) : std::string("NA")});
}

} // namespace leadflux
