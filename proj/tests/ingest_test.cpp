#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "patrol/ingest.hpp"
#include "patrol/synthetic.hpp"
#include "patrol/timeutil.hpp"

using namespace patrol;

namespace {

Minutes at(const char* text) { return *parse_timestamp(text); }

}  // namespace

TEST_CASE("grid construction") {
  const auto one = build_grid({0, 0, 1, 1}, 1, 1);
  CHECK(one.size() == 1);
  CHECK(one.extent(0).max_lat == 1.0);
  const auto seattle = build_grid({47.60, -122.36, 47.604, -122.28}, 2, 47);
  CHECK(seattle.size() == 94);
  CHECK(seattle.cell_area_m2 > 0.0);
  CHECK_THROWS_AS(build_grid({1, 1, 1, 2}, 1, 1), ConfigError);
  CHECK_THROWS_AS(build_grid({0, 0, 1, 1}, 0, 1), ConfigError);
}

TEST_CASE("binning") {
  const auto g = build_grid({0, 0, 2, 3}, 2, 3);
  CHECK(bin({0, 0}, g) == 0);
  for (NodeId id = 0; id < 6; ++id) CHECK(bin(g.cells[static_cast<std::size_t>(id)].centroid, g) == id);
  CHECK_FALSE(bin({-0.1, 0.5}, g).has_value());
  CHECK_FALSE(bin({1, 3.5}, g).has_value());
  CHECK(bin({1.0, 0.5}, g) == 0);  // shared edge goes to the lower index
  CHECK(bin({2.0, 3.0}, g) == 5);
}

TEST_CASE("csv loading") {
  std::istringstream empty("timestamp,lat,lon,offense_type\n");
  CHECK(read_crimes(empty).records.empty());

  std::istringstream three(
      "timestamp,lat,lon,offense_type\n"
      "2013-01-01T10:00:00,47.6,-122.3,THEFT\n"
      "2013-01-01T09:00:00,47.6,-122.3,\"ASSAULT, SIMPLE\"\n"
      "2013-01-01T11:00:00,47.6,-122.3,BURGLARY\n");
  const auto crimes = read_crimes(three);
  REQUIRE(crimes.records.size() == 3);
  CHECK(crimes.records[0].time == at("2013-01-01T09:00"));
  CHECK(crimes.records[0].offense_type == "ASSAULT, SIMPLE");
  CHECK(crimes.records[2].time == at("2013-01-01T11:00"));

  std::istringstream bad(
      "timestamp,lat,lon,call_type\n"
      "not-a-time,47.6,-122.3,Robbery\n"
      "2013-01-01T09:00,47.6,-122.3,Robbery\n");
  const auto calls = read_calls(bad);
  CHECK(calls.records.size() == 1);
  CHECK(calls.skipped == 1);
  CHECK(calls.warnings.size() == 1);

  std::istringstream wrong("time,lat,lon,offense_type\n");
  CHECK_THROWS_AS(read_crimes(wrong), LoadError);
  CHECK_THROWS_AS(load_pois("/nonexistent/pois.csv"), LoadError);
}

TEST_CASE("csv round trip") {
  SyntheticParams p;
  p.n_days = 3;
  p.start = at("2013-01-01");
  const auto s = generate_synthetic(p, 5).scenario;
  REQUIRE_FALSE(s.crimes.empty());
  std::stringstream crimes, checkins, pois, calls;
  write_crimes(crimes, s.crimes);
  write_checkins(checkins, s.checkins);
  write_pois(pois, s.pois);
  write_calls(calls, s.calls);
  const auto c2 = read_crimes(crimes);
  const auto k2 = read_checkins(checkins);
  const auto p2 = read_pois(pois);
  const auto e2 = read_calls(calls);
  CHECK(c2.skipped + k2.skipped + p2.skipped + e2.skipped == 0);
  REQUIRE(c2.records.size() == s.crimes.size());
  for (std::size_t i = 0; i < s.crimes.size(); ++i) {
    CHECK(c2.records[i].pos == s.crimes[i].pos);
    CHECK(c2.records[i].time == s.crimes[i].time);
  }
  CHECK(k2.records.size() == s.checkins.size());
  CHECK(p2.records.size() == s.pois.size());
  CHECK(e2.records.size() == s.calls.size());
  CHECK(std::stod(format_double(0.1 + 0.2)) == 0.1 + 0.2);
}

TEST_CASE("scenario binning drops outsiders") {
  const auto g = build_grid({0, 0, 1, 1}, 1, 2);
  std::vector<CrimeRecord> crimes = {
      {at("2013-01-01T10:00"), {0.5, 0.25}, "A", kNoNode},
      {at("2013-01-01T10:00"), {1.5, 0.25}, "B", kNoNode},
      {at("2013-01-05T10:00"), {0.5, 0.75}, "C", kNoNode},
  };
  std::vector<PoiRecord> pois = {{"v1", {0.5, 0.75}, "cafe", kNoNode}, {"v1", {0.5, 0.75}, "cafe", kNoNode}};
  std::vector<CallRecord> calls = {{at("2013-01-01T12:00"), {0.5, 0.75}, "Robbery", kNoNode}};
  DropCounts drops;
  const auto s =
      make_scenario(g, crimes, {}, pois, calls, at("2013-01-01T07:00"), at("2013-01-03"), &drops);
  CHECK(s.start == at("2013-01-01"));
  CHECK(s.n_days() == 2);
  REQUIRE(s.crimes.size() == 1);
  CHECK(s.crimes[0].node == 0);
  CHECK(drops.out_of_bbox == 1);
  CHECK(drops.out_of_range == 1);
  CHECK(drops.duplicate_venues == 1);
  const auto calls_out = s.emergency_calls();
  REQUIRE(calls_out.size() == 1);
  CHECK(calls_out[0].node == 1);
  CHECK(calls_out[0].priority == 4);
  CHECK(s.day_of(at("2013-01-02T23:59")) == 1);
  CHECK_THROWS_AS(make_scenario(g, {}, {}, {}, {}, at("2013-01-02"), at("2013-01-02")), ConfigError);
}

TEST_CASE("synthetic generator") {
  SyntheticParams p;
  p.n_days = 4;
  const auto a = generate_synthetic(p, 9);
  const auto b = generate_synthetic(p, 9);
  CHECK(a.scenario.crimes.size() == b.scenario.crimes.size());
  std::stringstream sa, sb;
  write_crimes(sa, a.scenario.crimes);
  write_crimes(sb, b.scenario.crimes);
  CHECK(sa.str() == sb.str());
  CHECK(a.scenario.grid.size() == 94);
  p.crime_rate = 0.0;
  CHECK(generate_synthetic(p, 9).scenario.crimes.empty());
}
