#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace leadflux::csv {

struct Row {
    std::size_t line = 0; // 1-based physical line where the row starts
    std::vector<std::string> fields;
};

// Minimal RFC 4180 reader: comma separated, double-quote escaping, LF or CRLF.
class Reader {
public:
    explicit Reader(std::istream& in) : in_(in) {}

    // Returns false at end of input.
    bool next(Row& row);

private:
    std::istream& in_;
    std::size_t line_ = 0;
};

std::string quote(std::string_view field);

// Writes one comma-separated line, quoting fields as needed.
void write_row(std::ostream& out, const std::vector<std::string>& fields);

// Shortest representation that parses back to the same double.
std::string shortest(double x);
// Fixed-point with `digits` decimals; used for stable, diff-able artifacts.
std::string fixed(double x, int digits = 6);

std::optional<double> parse_double(std::string_view s);
std::optional<long long> parse_int(std::string_view s);

std::string_view trim(std::string_view s);

} // namespace leadflux::csv
