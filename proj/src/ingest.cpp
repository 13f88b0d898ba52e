#include "leadflux/ingest.hpp"

#include <algorithm>
#include <istream>
#include <map>
#include <ostream>

#include "leadflux/csv.hpp"
#include "leadflux/error.hpp"

namespace leadflux {

namespace {

std::optional<bool> parse_bool(std::string_view s) {
    s = csv::trim(s);
    std::string lower(s);
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
    if (lower == "true" || lower == "1" || lower == "yes" || lower == "t") return true;
    if (lower == "false" || lower == "0" || lower == "no" || lower == "f" || lower.empty()) return false;
    return std::nullopt;
}

// Fills `rec` from one CSV row; returns the name of the first offending field.
std::optional<std::pair<std::string, std::string>>
fill_record(const std::vector<std::string>& fields, const std::map<std::string, std::size_t>& cols,
            BookingRecord& rec) {
    auto get = [&](std::string_view name) -> const std::string* {
        auto it = cols.find(std::string(name));
        if (it == cols.end() || it->second >= fields.size()) return nullptr;
        return &fields[it->second];
    };
    auto fail = [](std::string_view f, std::string why) {
        return std::optional<std::pair<std::string, std::string>>{{std::string(f), std::move(why)}};
    };

    const std::string* f = get("arrival_date");
    if (!f) return fail("arrival_date", "missing value");
    auto arrival = parse_date(csv::trim(*f));
    if (!arrival) return fail("arrival_date", "not a valid YYYY-MM-DD date: '" + *f + "'");
    rec.arrival_date = *arrival;

    f = get("booking_ts");
    if (!f) return fail("booking_ts", "missing value");
    auto ts = parse_timestamp(csv::trim(*f));
    if (!ts) return fail("booking_ts", "not a valid YYYY-MM-DDTHH:MM:SS timestamp: '" + *f + "'");
    rec.booking_ts = *ts;

    if ((f = get("stay_nights")) && !csv::trim(*f).empty()) {
        auto v = csv::parse_int(*f);
        if (!v || *v < 1) return fail("stay_nights", "expected a positive integer: '" + *f + "'");
        rec.stay_nights = static_cast<int>(*v);
    }
    if ((f = get("channel")) && !f->empty()) rec.channel = *f;
    if ((f = get("segment")) && !f->empty()) rec.segment = *f;
    if ((f = get("origin")) && !f->empty()) rec.origin = *f;
    if ((f = get("price_at_booking")) && !csv::trim(*f).empty()) {
        auto v = csv::parse_double(*f);
        if (!v || !(*v >= 0.0)) return fail("price_at_booking", "expected a nonnegative number: '" + *f + "'");
        rec.price_at_booking = *v;
    }
    if ((f = get("cancelled"))) {
        auto v = parse_bool(*f);
        if (!v) return fail("cancelled", "expected a boolean: '" + *f + "'");
        rec.cancelled = *v;
    }
    if ((f = get("property_id")) && !f->empty()) rec.property_id = *f;
    return std::nullopt;
}

} // namespace

std::string field_value(const BookingRecord& r, std::string_view column) {
    if (column == "arrival_date") return format_date(r.arrival_date);
    if (column == "booking_ts") return format_timestamp(r.booking_ts);
    if (column == "stay_nights") return std::to_string(r.stay_nights);
    if (column == "channel") return r.channel;
    if (column == "segment") return r.segment;
    if (column == "origin") return r.origin;
    if (column == "price_at_booking") return csv::shortest(r.price_at_booking);
    if (column == "cancelled") return r.cancelled ? "true" : "false";
    if (column == "property_id") return r.property_id;
    throw InvalidConfig("unknown booking column '" + std::string(column) + "'");
}

ParseResult parse_bookings(std::istream& in, const ParseOptions& options) {
    ParseResult result;
    csv::Reader reader(in);
    csv::Row row;
    if (!reader.next(row)) throw MissingColumn("arrival_date");

    std::map<std::string, std::size_t> cols;
    for (std::size_t i = 0; i < row.fields.size(); ++i) {
        std::string name(csv::trim(row.fields[i]));
        if (i == 0 && name.starts_with("\xEF\xBB\xBF")) name.erase(0, 3); // UTF-8 BOM
        cols.emplace(std::move(name), i);
    }
    for (std::string_view required : {"arrival_date", "booking_ts"})
        if (!cols.contains(std::string(required))) throw MissingColumn(std::string(required));

    while (reader.next(row)) {
        if (row.fields.size() == 1 && csv::trim(row.fields[0]).empty()) continue; // blank line
        BookingRecord rec;
        if (auto bad = fill_record(row.fields, cols, rec)) {
            if (options.policy == RowErrorPolicy::FailFast) throw RowParseError(row.line, bad->first, bad->second);
            result.rejected.push_back({row.line, bad->first, bad->second});
            continue;
        }
        result.records.push_back(std::move(rec));
    }
    return result;
}

void write_bookings(std::ostream& out, std::span<const BookingRecord> records) {
    std::vector<std::string> fields(kBookingColumns.begin(), kBookingColumns.end());
    csv::write_row(out, fields);
    for (const auto& r : records) {
        for (std::size_t i = 0; i < kBookingColumns.size(); ++i) fields[i] = field_value(r, kBookingColumns[i]);
        csv::write_row(out, fields);
    }
}

LeadTimeResult compute_lead_times(std::span<const BookingRecord> records, std::span<const std::string> group_cols,
                                  const LeadTimeOptions& options) {
    for (const auto& c : group_cols)
        if (std::find(kBookingColumns.begin(), kBookingColumns.end(), c) == kBookingColumns.end())
            throw InvalidConfig("unknown group column '" + c + "'");

    LeadTimeResult out;
    out.leads.reserve(records.size());
    for (const auto& r : records) {
        if (options.exclude_cancelled && r.cancelled) {
            ++out.dropped_cancelled;
            continue;
        }
        int lead = lead_days_of(r);
        if (lead < 0) {
            ++out.dropped_negative;
            continue;
        }
        LeadTimeRecord lt;
        lt.lead_days = lead;
        lt.arrival_month = YearMonth::of(r.arrival_date);
        lt.group_key.reserve(group_cols.size());
        for (const auto& c : group_cols) lt.group_key.push_back(field_value(r, c));
        out.leads.push_back(std::move(lt));
    }
    return out;
}

SupportSpec select_support(std::span<const LeadTimeRecord> leads, double coverage_target,
                           std::optional<int> user_cap) {
    if (leads.empty()) throw EmptyInput("select_support: no lead times");
    if (!(coverage_target > 0.0 && coverage_target <= 1.0))
        throw InvalidConfig("coverage_target must lie in (0, 1]");
    if (user_cap && *user_cap < 1) throw InvalidConfig("delta_max cap must be at least 1");

    std::map<int, std::int64_t> counts;
    std::int64_t total = 0;
    for (const auto& l : leads) {
        counts[l.lead_days] += l.weight;
        total += l.weight;
    }
    int k = counts.rbegin()->first;
    std::int64_t cum = 0;
    for (const auto& [lead, n] : counts) {
        cum += n;
        if (static_cast<double>(cum) / static_cast<double>(total) >= coverage_target) {
            k = lead;
            break;
        }
    }
    SupportSpec spec;
    spec.coverage_target = coverage_target;
    spec.delta_max = std::max(1, user_cap ? std::min(k, *user_cap) : k);
    spec.censored_bin = counts.rbegin()->first > spec.delta_max;
    return spec;
}

} // namespace leadflux
