#include "leadflux/synth.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "leadflux/error.hpp"
#include "leadflux/random.hpp"

namespace leadflux {

namespace {

constexpr std::uint64_t kSegmentStream = 1;
constexpr std::uint64_t kDayStream = 2;

const char* const kChannels[] = {"direct", "ota", "gds"};
const char* const kOrigins[] = {"domestic", "international"};

std::uint64_t day_number(Date d) { return static_cast<std::uint64_t>(d.time_since_epoch().count() + (1LL << 40)); }

} // namespace

void validate(const SyntheticConfig& c) {
    if (!(c.start_date < c.end_date)) throw InvalidConfig("start_date must precede end_date");
    if (!(c.avg_bookings_per_day > 0.0)) throw InvalidConfig("avg_bookings_per_day must be positive");
    if (c.properties < 1 || c.properties > 999) throw InvalidConfig("properties must lie in [1, 999]");
    if (c.max_lead_days < 1) throw InvalidConfig("max_lead_days must be positive");
    if (!(c.compression_level >= 0.0 && c.compression_level <= 1.0))
        throw InvalidConfig("compression_level must lie in [0, 1]");
    const auto& m = c.mixture;
    if (!(m.short_sigma > 0.0 && m.long_sigma > 0.0)) throw InvalidConfig("mixture sigmas must be positive");
    if (!(m.base_short_weight >= 0.0 && m.base_short_weight <= 1.0))
        throw InvalidConfig("base_short_weight must lie in [0, 1]");
    for (double s : c.seasonality)
        if (!(s > 0.0)) throw InvalidConfig("seasonality multipliers must be positive");
    for (const auto& e : c.event_weeks)
        if (!(e.multiplier > 0.0)) throw InvalidConfig("event-week multipliers must be positive");
    if (!(c.segment_effect_sd >= 0.0)) throw InvalidConfig("segment_effect_sd must be nonnegative");
    if (c.segments.empty()) throw InvalidConfig("at least one segment is required");
    if (!(c.cancel_probability >= 0.0 && c.cancel_probability <= 1.0))
        throw InvalidConfig("cancel_probability must lie in [0, 1]");
}

std::string property_id(int index) { return fmt::format("P{:03d}", index + 1); }

std::vector<BookingRecord> generate_synthetic_bookings(const SyntheticConfig& config) {
    validate(config);
    const auto& mix = config.mixture;
    const double w_short = effective_short_weight(config.compression_level, mix.base_short_weight);
    const double sd = config.segment_effect_sd;
    const auto n_seg = config.segments.size();

    std::vector<BookingRecord> out;
    for (int p = 0; p < config.properties; ++p) {
        const std::string pid = property_id(p);
        // Mean-one lognormal intensity factor per (property, segment).
        std::vector<double> effect(n_seg);
        for (std::size_t s = 0; s < n_seg; ++s) {
            Stream rng(config.seed, {kSegmentStream, static_cast<std::uint64_t>(p), s});
            effect[s] = std::exp(sd * rng.normal() - 0.5 * sd * sd);
        }

        for (Date day = config.start_date; day <= config.end_date; day += std::chrono::days{1}) {
            Stream rng(config.seed, {kDayStream, static_cast<std::uint64_t>(p), day_number(day)});
            const YearMonth ym = YearMonth::of(day);
            double intensity = config.avg_bookings_per_day * config.seasonality[static_cast<std::size_t>(ym.month - 1)];
            for (const auto& e : config.event_weeks)
                if (day >= e.start && day < e.start + std::chrono::days{7}) intensity *= e.multiplier;

            for (std::size_t s = 0; s < n_seg; ++s) {
                const auto n = rng.poisson(intensity * effect[s] / static_cast<double>(n_seg));
                for (std::int64_t i = 0; i < n; ++i) {
                    const bool is_short = rng.uniform01() < w_short;
                    const double raw = is_short ? rng.lognormal(mix.short_mu, mix.short_sigma)
                                                : rng.lognormal(mix.long_mu, mix.long_sigma);
                    const int lead = static_cast<int>(std::clamp<double>(std::round(raw), 0.0, config.max_lead_days));
                    const auto second_of_day = static_cast<long long>(rng.below(86400));

                    BookingRecord r;
                    r.arrival_date = day;
                    r.booking_ts = Timestamp{day - std::chrono::days{lead}} + std::chrono::seconds{second_of_day};
                    r.stay_nights = 1 + static_cast<int>(rng.poisson(1.5));
                    const double u = rng.uniform01();
                    r.channel = kChannels[u < 0.5 ? 0 : (u < 0.9 ? 1 : 2)];
                    r.segment = config.segments[s];
                    r.origin = kOrigins[rng.uniform01() < 0.75 ? 0 : 1];
                    const double price = rng.lognormal(std::log(120.0), 0.3) *
                                         config.seasonality[static_cast<std::size_t>(ym.month - 1)];
                    r.price_at_booking = std::round(price * 100.0) / 100.0;
                    r.cancelled = rng.bernoulli(config.cancel_probability);
                    r.property_id = pid;
                    out.push_back(std::move(r));
                }
            }
        }
    }
    return out;
}

double mass_within(std::span<const BookingRecord> records, int horizon_days) {
    std::size_t total = 0, inside = 0;
    for (const auto& r : records) {
        int lead = lead_days_of(r);
        if (lead < 0) continue;
        ++total;
        if (lead <= horizon_days) ++inside;
    }
    if (total == 0) throw EmptyInput("mass_within: no bookings");
    return static_cast<double>(inside) / static_cast<double>(total);
}

} // namespace leadflux
