#include "leadflux/distributions.hpp"

#include <algorithm>
#include <istream>
#include <map>
#include <ostream>

#include "leadflux/csv.hpp"
#include "leadflux/error.hpp"

namespace leadflux {

namespace {

LeadTimeHistogram from_counts(GroupKey key, YearMonth month, const SupportSpec& support,
                              const std::vector<std::int64_t>& counts) {
    LeadTimeHistogram h;
    h.group_key = std::move(key);
    h.month = month;
    h.support = support;
    for (auto c : counts) h.count += c;
    h.mass.resize(counts.size());
    for (std::size_t k = 0; k < counts.size(); ++k)
        h.mass[k] = static_cast<double>(counts[k]) / static_cast<double>(h.count);
    return h;
}

void check_support(const SupportSpec& s) {
    if (s.delta_max < 1) throw InvalidConfig("delta_max must be at least 1");
}

std::vector<std::string> group_header(std::span<const std::string> group_cols) {
    return {group_cols.begin(), group_cols.end()};
}

} // namespace

HistogramSet leadtime_histograms(std::span<const LeadTimeRecord> leads, const SupportSpec& support) {
    check_support(support);
    std::map<std::pair<GroupKey, YearMonth>, std::vector<std::int64_t>> cohorts;
    HistogramSet out;
    for (const auto& l : leads) {
        auto& counts = cohorts[{l.group_key, l.arrival_month}];
        if (counts.empty()) counts.assign(support.cells(), 0);
        if (l.lead_days > support.delta_max && !support.censored_bin) out.clamped += 1;
        counts[cell_of(l.lead_days, support)] += l.weight;
    }
    out.histograms.reserve(cohorts.size());
    for (const auto& [key, counts] : cohorts) out.histograms.push_back(from_counts(key.first, key.second, support, counts));
    return out;
}

HistogramSet leadtime_histograms_per_group(std::span<const LeadTimeRecord> leads, double coverage_target,
                                           std::optional<int> user_cap) {
    std::map<GroupKey, std::vector<LeadTimeRecord>> groups;
    for (const auto& l : leads) groups[l.group_key].push_back(l);
    HistogramSet out;
    for (const auto& [key, g] : groups) {
        auto part = leadtime_histograms(g, select_support(g, coverage_target, user_cap));
        out.clamped += part.clamped;
        for (auto& h : part.histograms) out.histograms.push_back(std::move(h));
    }
    return out;
}

LeadTimeHistogram histogram_from_leads(std::span<const int> leads, const SupportSpec& support) {
    check_support(support);
    if (leads.empty()) throw EmptyCohort("histogram_from_leads: no bookings");
    std::vector<std::int64_t> counts(support.cells(), 0);
    for (int l : leads) {
        if (l < 0) throw InvalidConfig("negative lead time");
        counts[cell_of(l, support)] += 1;
    }
    return from_counts({}, {}, support, counts);
}

LeadTimeHistogram reproject(const LeadTimeHistogram& h, const SupportSpec& target) {
    LeadTimeHistogram out = h;
    out.support = target;
    out.mass.assign(target.cells(), 0.0);
    const auto dm = static_cast<std::size_t>(h.support.delta_max);
    for (std::size_t k = 0; k < h.mass.size(); ++k) {
        // The source's censored cell sits beyond delta_max, so treat it as lead delta_max + 1.
        int lead = k <= dm ? static_cast<int>(k) : h.support.delta_max + 1;
        if (lead > target.delta_max && !target.censored_bin && h.mass[k] != 0.0)
            throw SupportMismatch("reproject: mass beyond delta_max " + std::to_string(target.delta_max) +
                                  " but target has no censored bin");
        out.mass[cell_of(lead, target)] += h.mass[k];
    }
    return out;
}

PickupCurve pickup_curve(const LeadTimeHistogram& hist) {
    PickupCurve c;
    c.group_key = hist.group_key;
    c.month = hist.month;
    const auto n = static_cast<std::size_t>(hist.support.delta_max) + 1;
    c.chist.resize(n);
    double acc = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        acc += hist.mass[k];
        c.chist[k] = std::min(acc, 1.0);
    }
    return c;
}

std::vector<PickupCurve> pickup_curves(std::span<const LeadTimeHistogram> hists) {
    std::vector<PickupCurve> out;
    out.reserve(hists.size());
    for (const auto& h : hists) out.push_back(pickup_curve(h));
    return out;
}

double CoarsenedHistogram::total_mass() const {
    double s = censored.value_or(0.0);
    for (const auto& b : bins) s += b.mass;
    return s;
}

std::vector<double> CoarsenedHistogram::cumulative() const {
    std::vector<double> c;
    c.reserve(bins.size());
    double acc = 0.0;
    for (const auto& b : bins) c.push_back(acc += b.mass);
    return c;
}

CoarsenedHistogram coarsen_tail_weekly(const LeadTimeHistogram& hist, int cutoff_days) {
    const int dm = hist.support.delta_max;
    if (cutoff_days < 0 || cutoff_days > dm)
        throw InvalidCutoff("cutoff " + std::to_string(cutoff_days) + " outside [0, " + std::to_string(dm) + "]");
    CoarsenedHistogram out;
    for (int k = 0; k <= cutoff_days; ++k) out.bins.push_back({k, k, hist.mass[static_cast<std::size_t>(k)]});
    for (int lo = cutoff_days + 1; lo <= dm; lo += 7) {
        TailBin b{lo, std::min(lo + 6, dm), 0.0};
        for (int k = b.lo; k <= b.hi; ++k) b.mass += hist.mass[static_cast<std::size_t>(k)];
        out.bins.push_back(b);
    }
    if (hist.support.censored_bin) out.censored = hist.mass.back();
    return out;
}

void write_histograms_csv(std::ostream& out, std::span<const LeadTimeHistogram> hists,
                          std::span<const std::string> group_cols) {
    auto header = group_header(group_cols);
    for (const char* c : {"month", "k", "mass", "count"}) header.emplace_back(c);
    csv::write_row(out, header);
    for (const auto& h : hists) {
        for (std::size_t k = 0; k < h.mass.size(); ++k) {
            std::vector<std::string> row(h.group_key.begin(), h.group_key.end());
            row.push_back(h.month.str());
            row.push_back(k <= static_cast<std::size_t>(h.support.delta_max)
                              ? std::to_string(k)
                              : std::to_string(h.support.delta_max) + "+");
            row.push_back(csv::shortest(h.mass[k]));
            row.push_back(std::to_string(h.count));
            csv::write_row(out, row);
        }
    }
}

void write_pickup_csv(std::ostream& out, std::span<const PickupCurve> curves, std::span<const std::string> group_cols) {
    auto header = group_header(group_cols);
    for (const char* c : {"month", "delta", "chist"}) header.emplace_back(c);
    csv::write_row(out, header);
    for (const auto& c : curves) {
        for (std::size_t d = 0; d < c.chist.size(); ++d) {
            std::vector<std::string> row(c.group_key.begin(), c.group_key.end());
            row.push_back(c.month.str());
            row.push_back(std::to_string(d));
            row.push_back(csv::shortest(c.chist[d]));
            csv::write_row(out, row);
        }
    }
}

std::vector<LeadTimeHistogram> read_histograms_csv(std::istream& in, std::span<const std::string> group_cols) {
    csv::Reader reader(in);
    csv::Row row;
    if (!reader.next(row)) throw EmptyInput("histogram CSV has no header");
    const std::size_t g = group_cols.size();
    if (row.fields.size() != g + 4) throw MissingColumn("month/k/mass/count");

    std::vector<LeadTimeHistogram> out;
    while (reader.next(row)) {
        if (row.fields.size() != g + 4) throw RowParseError(row.line, "k", "wrong number of fields");
        GroupKey key(row.fields.begin(), row.fields.begin() + static_cast<std::ptrdiff_t>(g));
        auto month = YearMonth::parse(row.fields[g]);
        if (!month) throw RowParseError(row.line, "month", "expected YYYY-MM");
        auto mass = csv::parse_double(row.fields[g + 2]);
        auto count = csv::parse_int(row.fields[g + 3]);
        if (!mass || *mass < 0.0) throw RowParseError(row.line, "mass", "expected a nonnegative number");
        if (!count || *count < 1) throw RowParseError(row.line, "count", "expected a positive integer");

        if (out.empty() || out.back().group_key != key || out.back().month != *month) {
            LeadTimeHistogram h;
            h.group_key = key;
            h.month = *month;
            h.count = *count;
            out.push_back(std::move(h));
        }
        auto& h = out.back();
        std::string kf(csv::trim(row.fields[g + 1]));
        if (!kf.empty() && kf.back() == '+') {
            auto dm = csv::parse_int(std::string_view(kf).substr(0, kf.size() - 1));
            if (!dm || *dm != static_cast<long long>(h.mass.size()) - 1)
                throw RowParseError(row.line, "k", "censored cell out of place");
            h.support.censored_bin = true;
        } else {
            auto k = csv::parse_int(kf);
            if (!k || *k != static_cast<long long>(h.mass.size()) || h.support.censored_bin)
                throw RowParseError(row.line, "k", "cells must be listed in order 0..delta_max");
        }
        h.mass.push_back(*mass);
    }
    for (auto& h : out) {
        h.support.delta_max = static_cast<int>(h.mass.size()) - 1 - (h.support.censored_bin ? 1 : 0);
        check_support(h.support);
    }
    return out;
}

} // namespace leadflux
