#pragma once

#include <chrono>
#include <compare>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace leadflux {

using Date = std::chrono::sys_days;
using Timestamp = std::chrono::sys_seconds;

// Ordered tuple of grouping-column values, rendered as strings.
using GroupKey = std::vector<std::string>;

std::string join_key(const GroupKey& key, std::string_view sep = "|");

struct YearMonth {
    int year = 1970;
    int month = 1; // 1..12

    static YearMonth of(Date d);
    static YearMonth from_index(int index);
    static std::optional<YearMonth> parse(std::string_view text);

    // Months since year 0; consecutive months differ by one.
    int index() const { return year * 12 + (month - 1); }
    YearMonth plus(int months) const { return from_index(index() + months); }
    std::string str() const;

    auto operator<=>(const YearMonth&) const = default;
};

std::optional<Date> parse_date(std::string_view text);
// Accepts YYYY-MM-DDTHH:MM:SS (a space in place of 'T' is tolerated).
std::optional<Timestamp> parse_timestamp(std::string_view text);

std::string format_date(Date d);
std::string format_timestamp(Timestamp ts);

inline Date date_of(Timestamp ts) { return std::chrono::floor<std::chrono::days>(ts); }

// Whole calendar days from `from` to `to` (negative when `to` precedes `from`).
inline int days_between(Date from, Date to) { return static_cast<int>((to - from).count()); }

Date make_date(int y, unsigned m, unsigned d);

} // namespace leadflux
