#include <doctest.h>

#include <cmath>

#include "patrol/domain.hpp"
#include "patrol/rng.hpp"
#include "patrol/timeutil.hpp"

using namespace patrol;

TEST_CASE("priority lookup by response type") {
  CHECK(priority_of("Robbery") == 4);
  CHECK(priority_of("Homicide") == 5);
  CHECK(priority_of("Fraud call") == 1);
  CHECK(priority_of("  robbery ") == 4);
  CHECK(priority_of("Jaywalking") == 1);
  CHECK_FALSE(priority_lookup("Jaywalking").has_value());
  CHECK(priority_lookup("Burglary") == 3);
  CHECK(call_types_for(3).size() == 3);
}

TEST_CASE("benefit") {
  CHECK(benefit(0.0, 1, 0.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(benefit(0.0, 5, 4.0) == doctest::Approx(272.99075016572118).epsilon(1e-12));
  CHECK(benefit(1.0, 1, 2.0) == doctest::Approx(20.085536923187668).epsilon(1e-12));
  PatrolNode hot;
  hot.state = NodeState::Hotspot;
  hot.importance = 1.0;
  CHECK(benefit(hot) == doctest::Approx(20.085536923187668).epsilon(1e-12));
}

TEST_CASE("arrival multiplier rows") {
  CHECK(arrival_multiplier(10, 5) == 1.0);
  CHECK(arrival_multiplier(45, 2) == 0.6);
  CHECK(arrival_multiplier(70, 1) == 0.5);
  CHECK(arrival_multiplier(20, 4) == 0.0);
  CHECK(arrival_multiplier(14.999, 5) == 1.0);
  CHECK(arrival_multiplier(15, 3) == 0.8);
  CHECK(arrival_multiplier(30, 3) == 0.8);
  CHECK(arrival_multiplier(30.001, 2) == 0.6);
  CHECK(arrival_multiplier(30.001, 3) == 0.0);
  CHECK(arrival_multiplier(60, 2) == 0.0);
  CHECK(arrival_multiplier(60, 1) == 0.5);
}

TEST_CASE("travel time") {
  const LatLon a{47.6, -122.3};
  CHECK(travel_minutes(a, a, 1.2) == 0.0);
  const double dlat = 720.0 / (6371008.8 * M_PI / 180.0);
  const LatLon b{47.6 + dlat, -122.3};
  CHECK(haversine_meters(a, b) == doctest::Approx(720.0).epsilon(1e-9));
  CHECK(travel_minutes(a, b, 1.2) == doctest::Approx(10.0).epsilon(1e-9));
  const LatLon c{47.61, -122.29};
  CHECK(travel_minutes(a, c, 1.2) == travel_minutes(c, a, 1.2));
  CHECK_THROWS_AS(travel_minutes(a, b, 0.0), ConfigError);
}

TEST_CASE("officer status transitions") {
  CHECK(can_transition(OfficerStatus::Idle, OfficerStatus::Travelling));
  CHECK(can_transition(OfficerStatus::Travelling, OfficerStatus::Visiting));
  CHECK(can_transition(OfficerStatus::Visiting, OfficerStatus::Idle));
  CHECK(can_transition(OfficerStatus::Travelling, OfficerStatus::OffDuty));
  CHECK_FALSE(can_transition(OfficerStatus::Idle, OfficerStatus::Visiting));
  CHECK_FALSE(can_transition(OfficerStatus::OffDuty, OfficerStatus::Idle));
}

TEST_CASE("timestamps") {
  const auto t = parse_timestamp("2013-01-02T08:30:59");
  REQUIRE(t);
  CHECK(format_timestamp(*t) == "2013-01-02T08:30:00");
  CHECK(parse_timestamp("2013-01-02 08:30") == t);
  CHECK(slot_of(*t) == 4);
  CHECK(minute_of_day(*t) == 510);
  CHECK(format_date(*t) == "2013-01-02");
  CHECK_FALSE(parse_timestamp("2013-13-02").has_value());
  CHECK_FALSE(parse_timestamp("yesterday").has_value());
  CHECK(year_month(*t) == std::pair{2013, 1});
}

TEST_CASE("derived seeds differ by name and index") {
  CHECK(derive_seed(1, "a") != derive_seed(1, "b"));
  CHECK(derive_seed(1, "a", 1) != derive_seed(1, "a", 2));
  CHECK(derive_seed(1, "a", 1, 0) != derive_seed(1, "a", 1, 1));
  CHECK(derive_seed(7, "x", 3, 4) == derive_seed(7, "x", 3, 4));
  Rng rng(3);
  for (int i = 0; i < 1000; ++i) {
    const double u = uniform_open_closed(rng, 0.5, 1.0);
    CHECK((u > 0.5 && u <= 1.0));
  }
}
