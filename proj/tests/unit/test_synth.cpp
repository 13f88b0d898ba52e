#include <doctest.h>

#include <set>
#include <sstream>

#include "leadflux/error.hpp"
#include "leadflux/synth.hpp"

using namespace leadflux;

namespace {

SyntheticConfig small_config(double c = 0.4, std::uint64_t seed = 123) {
    SyntheticConfig cfg;
    cfg.start_date = make_date(2022, 1, 1);
    cfg.end_date = make_date(2022, 6, 30);
    cfg.compression_level = c;
    cfg.seed = seed;
    return cfg;
}

BookingRecord with_lead(int lead) {
    BookingRecord r;
    r.arrival_date = make_date(2022, 3, 1);
    r.booking_ts = Timestamp{r.arrival_date - std::chrono::days{lead}};
    return r;
}

} // namespace

TEST_CASE("effective short weight") {
    CHECK(effective_short_weight(1.0, 0.3) == 1.0);
    CHECK(effective_short_weight(0.0, 0.3) == 0.3);
    CHECK(effective_short_weight(0.5, 0.2) == doctest::Approx(0.6));
}

TEST_CASE("c = 1 draws every lead from the short component") {
    auto cfg = small_config(1.0);
    cfg.mixture.short_mu = std::log(3.0);
    cfg.mixture.short_sigma = 0.1;
    for (const auto& r : generate_synthetic_bookings(cfg)) CHECK(lead_days_of(r) <= 5);
}

TEST_CASE("generator output is deterministic and in range") {
    auto cfg = small_config();
    cfg.event_weeks.push_back({make_date(2022, 3, 7), 2.0});
    auto a = generate_synthetic_bookings(cfg);
    auto b = generate_synthetic_bookings(cfg);
    CHECK(a == b);
    std::ostringstream sa, sb;
    write_bookings(sa, a);
    write_bookings(sb, b);
    CHECK(sa.str() == sb.str());
    cfg.seed = 124;
    CHECK(generate_synthetic_bookings(cfg) != a);

    std::set<std::string> props, segments;
    for (const auto& r : a) {
        const int lead = lead_days_of(r);
        CHECK(lead >= 0);
        CHECK(lead <= cfg.max_lead_days);
        CHECK(r.arrival_date >= cfg.start_date);
        CHECK(r.arrival_date <= cfg.end_date);
        CHECK(r.stay_nights >= 1);
        CHECK(r.price_at_booking > 0.0);
        props.insert(r.property_id);
        segments.insert(r.segment);
    }
    CHECK(props == std::set<std::string>{"P001", "P002", "P003"});
    CHECK(segments.size() == 3);
    const double expected = 20.0 * 3 * 181;
    CHECK(static_cast<double>(a.size()) > 0.8 * expected);
    CHECK(static_cast<double>(a.size()) < 1.2 * expected);
}

TEST_CASE("event weeks raise arrivals in that week") {
    auto cfg = small_config();
    auto base = generate_synthetic_bookings(cfg);
    cfg.event_weeks.push_back({make_date(2022, 3, 7), 3.0});
    auto boosted = generate_synthetic_bookings(cfg);
    auto in_week = [](const std::vector<BookingRecord>& rs) {
        return std::count_if(rs.begin(), rs.end(), [](const BookingRecord& r) {
            return r.arrival_date >= make_date(2022, 3, 7) && r.arrival_date < make_date(2022, 3, 14);
        });
    };
    CHECK(in_week(boosted) > 2 * in_week(base));
}

TEST_CASE("mass_within") {
    std::vector<BookingRecord> zeros(5, with_lead(0));
    CHECK(mass_within(zeros, 14) == 1.0);
    std::vector<BookingRecord> two = {with_lead(5), with_lead(20)};
    CHECK(mass_within(two, 14) == 0.5);
    CHECK_THROWS_AS(mass_within({}, 14), EmptyInput);
}

TEST_CASE("compression moves mass into the last two weeks") {
    SyntheticConfig lo, hi;
    lo.compression_level = 0.2;
    hi.compression_level = 0.8;
    auto a = generate_synthetic_bookings(lo);
    auto b = generate_synthetic_bookings(hi);
    REQUIRE(a.size() >= 40000);
    CHECK(mass_within(b, 14) > mass_within(a, 14));
}

TEST_CASE("config validation") {
    auto cfg = small_config();
    cfg.end_date = cfg.start_date;
    CHECK_THROWS_AS(validate(cfg), InvalidConfig);
    cfg = small_config(1.5);
    CHECK_THROWS_AS(generate_synthetic_bookings(cfg), InvalidConfig);
    cfg = small_config();
    cfg.seasonality[3] = 0.0;
    CHECK_THROWS_AS(validate(cfg), InvalidConfig);
    cfg = small_config();
    cfg.mixture.long_sigma = 0.0;
    CHECK_THROWS_AS(validate(cfg), InvalidConfig);
    CHECK(property_id(0) == "P001");
    CHECK(property_id(11) == "P012");
}
