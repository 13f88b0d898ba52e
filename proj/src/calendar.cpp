#include "leadflux/calendar.hpp"

#include <charconv>

#include <fmt/format.h>

namespace leadflux {

namespace {

bool parse_uint(std::string_view s, int& out) {
    if (s.empty()) return false;
    for (char c : s)
        if (c < '0' || c > '9') return false;
    auto res = std::from_chars(s.data(), s.data() + s.size(), out);
    return res.ec == std::errc{} && res.ptr == s.data() + s.size();
}

} // namespace

std::string join_key(const GroupKey& key, std::string_view sep) {
    std::string out;
    for (std::size_t i = 0; i < key.size(); ++i) {
        if (i) out += sep;
        out += key[i];
    }
    return out;
}

YearMonth YearMonth::of(Date d) {
    std::chrono::year_month_day ymd{d};
    return {static_cast<int>(ymd.year()), static_cast<int>(static_cast<unsigned>(ymd.month()))};
}

YearMonth YearMonth::from_index(int index) {
    int y = index >= 0 ? index / 12 : -((-index + 11) / 12);
    return {y, index - y * 12 + 1};
}

std::optional<YearMonth> YearMonth::parse(std::string_view text) {
    if (text.size() != 7 || text[4] != '-') return std::nullopt;
    int y = 0, m = 0;
    if (!parse_uint(text.substr(0, 4), y) || !parse_uint(text.substr(5, 2), m)) return std::nullopt;
    if (m < 1 || m > 12) return std::nullopt;
    return YearMonth{y, m};
}

std::string YearMonth::str() const { return fmt::format("{:04d}-{:02d}", year, month); }

Date make_date(int y, unsigned m, unsigned d) {
    return std::chrono::year_month_day{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
}

std::optional<Date> parse_date(std::string_view text) {
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
    int y = 0, m = 0, d = 0;
    if (!parse_uint(text.substr(0, 4), y) || !parse_uint(text.substr(5, 2), m) ||
        !parse_uint(text.substr(8, 2), d))
        return std::nullopt;
    std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(m)},
                                    std::chrono::day{static_cast<unsigned>(d)}};
    if (!ymd.ok()) return std::nullopt;
    return Date{ymd};
}

std::optional<Timestamp> parse_timestamp(std::string_view text) {
    if (text.size() != 19 || (text[10] != 'T' && text[10] != ' ') || text[13] != ':' || text[16] != ':')
        return std::nullopt;
    auto date = parse_date(text.substr(0, 10));
    if (!date) return std::nullopt;
    int hh = 0, mm = 0, ss = 0;
    if (!parse_uint(text.substr(11, 2), hh) || !parse_uint(text.substr(14, 2), mm) ||
        !parse_uint(text.substr(17, 2), ss))
        return std::nullopt;
    if (hh > 23 || mm > 59 || ss > 59) return std::nullopt;
    return Timestamp{*date} + std::chrono::hours{hh} + std::chrono::minutes{mm} + std::chrono::seconds{ss};
}

std::string format_date(Date d) {
    std::chrono::year_month_day ymd{d};
    return fmt::format("{:04d}-{:02d}-{:02d}", static_cast<int>(ymd.year()),
                       static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
}

std::string format_timestamp(Timestamp ts) {
    Date day = date_of(ts);
    auto secs = (ts - Timestamp{day}).count();
    return fmt::format("{}T{:02d}:{:02d}:{:02d}", format_date(day), secs / 3600, (secs / 60) % 60, secs % 60);
}

} // namespace leadflux
