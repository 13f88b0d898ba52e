#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "leadflux/calendar.hpp"

namespace leadflux {

// One booking event. Field order matches the CSV column order.
struct BookingRecord {
    Date arrival_date{};
    Timestamp booking_ts{};
    int stay_nights = 1;
    std::string channel = "unknown";
    std::string segment = "unknown";
    std::string origin = "unknown";
    double price_at_booking = 0.0;
    bool cancelled = false;
    std::string property_id = "unknown";

    bool operator==(const BookingRecord&) const = default;
};

inline constexpr std::array<std::string_view, 9> kBookingColumns = {
    "arrival_date", "booking_ts", "stay_nights", "channel", "segment",
    "origin", "price_at_booking", "cancelled", "property_id"};

// Renders one field of a record the way it appears in CSV output. Throws InvalidConfig
// for an unknown column name.
std::string field_value(const BookingRecord& r, std::string_view column);

enum class RowErrorPolicy { FailFast, SkipAndCount };

struct ParseOptions {
    RowErrorPolicy policy = RowErrorPolicy::FailFast;
};

struct RowError {
    std::size_t line = 0;
    std::string field;
    std::string message;
};

struct ParseResult {
    std::vector<BookingRecord> records; // input order
    std::vector<RowError> rejected;     // only populated under SkipAndCount
};

// Parses a booking CSV with a header row. arrival_date and booking_ts are mandatory;
// all other columns fall back to the BookingRecord defaults when absent.
ParseResult parse_bookings(std::istream& in, const ParseOptions& options = {});

void write_bookings(std::ostream& out, std::span<const BookingRecord> records);

struct LeadTimeRecord {
    int lead_days = 0;
    YearMonth arrival_month;
    GroupKey group_key;
    std::int64_t weight = 1;
};

struct LeadTimeOptions {
    bool exclude_cancelled = false;
};

struct LeadTimeResult {
    std::vector<LeadTimeRecord> leads;
    std::size_t dropped_negative = 0;
    std::size_t dropped_cancelled = 0;
};

// Lead time = calendar days from the booking date to the arrival date; time of day is
// ignored. Negative lead times are dropped and counted.
LeadTimeResult compute_lead_times(std::span<const BookingRecord> records,
                                  std::span<const std::string> group_cols,
                                  const LeadTimeOptions& options = {});

inline int lead_days_of(const BookingRecord& r) { return days_between(date_of(r.booking_ts), r.arrival_date); }

struct SupportSpec {
    int delta_max = 1;
    bool censored_bin = false;
    double coverage_target = 0.95;

    // Number of histogram cells, including the censored tail cell when present.
    std::size_t cells() const { return static_cast<std::size_t>(delta_max) + 1 + (censored_bin ? 1 : 0); }
    bool operator==(const SupportSpec& o) const {
        return delta_max == o.delta_max && censored_bin == o.censored_bin;
    }
};

// Smallest k whose weighted empirical CDF reaches coverage_target, then capped at
// user_cap. censored_bin is set when any lead lies beyond the chosen delta_max.
SupportSpec select_support(std::span<const LeadTimeRecord> leads, double coverage_target = 0.95,
                           std::optional<int> user_cap = std::nullopt);

} // namespace leadflux
