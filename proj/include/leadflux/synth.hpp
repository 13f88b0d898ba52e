#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "leadflux/calendar.hpp"
#include "leadflux/ingest.hpp"

namespace leadflux {

// Two lognormal lead-time components. The defaults put roughly 28% / 49% / 62% of
// bookings within 7 / 14 / 21 days at compression 0.4 with a 60-day cap.
struct MixtureSpec {
    double short_mu = std::log(8.0);
    double short_sigma = 0.8;
    double long_mu = std::log(34.0);
    double long_sigma = 0.7;
    double base_short_weight = 0.3;
};

struct EventWeek {
    Date start;        // first of seven affected arrival days
    double multiplier = 1.0;
};

struct SyntheticConfig {
    Date start_date = make_date(2021, 1, 1);
    Date end_date = make_date(2022, 12, 31);
    double avg_bookings_per_day = 20.0; // per property
    int properties = 3;
    int max_lead_days = 60;
    double compression_level = 0.4;
    std::uint64_t seed = 123;
    MixtureSpec mixture;
    std::array<double, 12> seasonality = {0.85, 0.85, 0.95, 1.0, 1.05, 1.15, 1.25, 1.2, 1.0, 0.95, 0.85, 0.9};
    std::vector<EventWeek> event_weeks;
    double segment_effect_sd = 0.15;
    std::vector<std::string> segments = {"leisure", "business", "group"};
    double cancel_probability = 0.1;
};

// Throws InvalidConfig when the configuration violates its invariants.
void validate(const SyntheticConfig& config);

// Short-component weight after compression: base + c (1 - base).
inline double effective_short_weight(double compression, double base_short_weight) {
    return base_short_weight + compression * (1.0 - base_short_weight);
}

// Property ids are P001, P002, ...
std::string property_id(int index);

// Bookings sorted by (property, arrival date). Each (property, arrival day) draws from
// its own stream, so output depends only on the configuration.
std::vector<BookingRecord> generate_synthetic_bookings(const SyntheticConfig& config);

// Share of bookings (with nonnegative lead) whose lead time is <= horizon_days.
double mass_within(std::span<const BookingRecord> records, int horizon_days);

} // namespace leadflux
