#include <doctest.h>

#include <sstream>

#include "leadflux/error.hpp"
#include "leadflux/risk.hpp"

using namespace leadflux;

namespace {

PickupCurve curve(GroupKey g, YearMonth m, std::vector<double> c) { return {std::move(g), m, std::move(c)}; }

} // namespace

TEST_CASE("relative_error_bound examples") {
    CHECK(relative_error_bound({0.1778, 14, 60, 0.478}) == doctest::Approx(0.570).epsilon(0.003 / 0.570));
    CHECK(relative_error_bound({0.1778, 7, 60, 0.289}) == doctest::Approx(1.086).epsilon(0.003 / 1.086));
    CHECK(relative_error_bound({0.3, 60, 60, 0.4}) == 0.0);
    CHECK(relative_error_bound({0.0, 7, 60, 0.3}) == 0.0);
    CHECK(relative_error_bound({0.2, 10, 20, 0.5}) == doctest::Approx(0.4));
    CHECK_THROWS_AS(relative_error_bound({0.2, 7, 60, 0.0}), ZeroPickup);
    CHECK_THROWS_AS(relative_error_bound({1.2, 7, 60, 0.5}), InvalidConfig);
    CHECK_THROWS_AS(relative_error_bound({0.2, 61, 60, 0.5}), InvalidConfig);
}

TEST_CASE("recommend_actions") {
    const ActionSet weekly{PriceCadence::Weekly, 0, 0.0}, daily{PriceCadence::Daily, 3, 5.0},
        intraday{PriceCadence::Intraday, 0, 15.0};
    CHECK(recommend_actions(0.369) == intraday);
    CHECK(recommend_actions(0.0) == weekly);
    CHECK(recommend_actions(0.149) == weekly);
    CHECK(recommend_actions(0.15) == daily);
    CHECK(recommend_actions(0.30) == intraday);
    PolicyTable stricter({{0.1, weekly}, {0.5, intraday}});
    CHECK(recommend_actions(0.05, stricter) == weekly);
    CHECK(recommend_actions(0.5, stricter) == intraday);
}

TEST_CASE("policy table validation and CSV") {
    CHECK_THROWS_AS(PolicyTable({}), InvalidPolicy);
    CHECK_THROWS_AS(PolicyTable({{0.2, {}}, {0.2, {}}}), InvalidPolicy);
    std::istringstream in("threshold,price_cadence,ap_buffer_days,staffing_buffer_pct\n0,weekly,0,0\n0.5,intraday,1,20\n");
    auto t = PolicyTable::from_csv(in);
    REQUIRE(t.tiers().size() == 2);
    CHECK(t.tiers()[1].actions == ActionSet{PriceCadence::Intraday, 1, 20.0});
    std::istringstream bad("threshold,price_cadence,ap_buffer_days,staffing_buffer_pct\n0,hourly,0,0\n");
    CHECK_THROWS_AS(PolicyTable::from_csv(bad), ValidationError);
}

TEST_CASE("risk_report") {
    std::vector<double> ramp(61);
    for (std::size_t i = 0; i < ramp.size(); ++i) ramp[i] = std::min(1.0, 0.1 + 0.015 * static_cast<double>(i));
    std::vector<PickupCurve> curves = {curve({"P001"}, {2022, 11}, ramp), curve({"P001"}, {2022, 12}, ramp),
                                       curve({"P002"}, {2022, 12}, ramp), curve({"P003"}, {2022, 12}, ramp)};
    SUBCASE("three groups, three horizons") {
        auto rows = risk_report(curves, 0.1778);
        REQUIRE(rows.size() == 9);
        for (auto& r : rows) {
            CHECK(r.month == YearMonth{2022, 12});
            REQUIRE(r.assessment);
            CHECK(r.assessment->bound == doctest::Approx(relative_error_bound({0.1778, r.delta, 60, r.chist})));
        }
        CHECK(rows[0].group_key == GroupKey{"P001"});
        CHECK(rows[1].delta == 14);
    }
    SUBCASE("single group at delta_max") {
        std::vector<PickupCurve> one = {curve({"A"}, {2022, 1}, ramp)};
        std::vector<int> h = {60};
        auto rows = risk_report(one, 0.3, h);
        REQUIRE(rows.size() == 1);
        CHECK(rows[0].assessment->bound == 0.0);
    }
    SUBCASE("zero pickup is flagged") {
        std::vector<double> late(61, 0.0);
        late[60] = 1.0;
        std::vector<PickupCurve> one = {curve({"A"}, {2022, 1}, late)};
        auto rows = risk_report(one, 0.2);
        REQUIRE(rows.size() == 3);
        CHECK(rows[0].zero_pickup());
        std::ostringstream out;
        std::vector<std::string> cols = {"property_id"};
        write_risk_csv(out, rows, cols);
        CHECK(out.str().find("A,2022-01,7,0,NA,NA,NA,NA\n") != std::string::npos);
    }
    SUBCASE("horizon beyond support") {
        std::vector<int> h = {90};
        CHECK_THROWS_AS(risk_report(curves, 0.2, h), InvalidConfig);
    }
    SUBCASE("per-group d") {
        auto rows = risk_report(curves, [](const GroupKey& g) { return g[0] == "P002" ? 0.4 : 0.1; });
        CHECK(rows[3].d == 0.4);
        CHECK(rows[0].d == 0.1);
    }
}
