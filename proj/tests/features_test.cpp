#include <doctest.h>

#include <sstream>

#include "oracles.hpp"
#include "patrol/features.hpp"
#include "patrol/synthetic.hpp"
#include "patrol/timeutil.hpp"

using namespace patrol;

namespace {

const Minutes kStart = *parse_timestamp("2013-01-01");

Minutes at_slot(int day, int slot, int minute = 5) { return kStart + day * kMinutesPerDay + slot * 120 + minute; }

CheckinRecord checkin(int day, int slot, const std::string& user, const std::string& venue, NodeId node = 0) {
  return {at_slot(day, slot), {}, user, venue, node};
}

FeatureRow labelled(Label label, NodeId node) {
  FeatureRow r;
  r.node = node;
  r.label = label;
  r.poi_distribution = Eigen::VectorXd::Zero(1);
  return r;
}

}  // namespace

TEST_CASE("historical density") {
  std::vector<CrimeRecord> crimes;
  for (int d = 0; d < 30; ++d) crimes.push_back({at_slot(d, 3), {}, "x", 0});
  const CrimeCounts c(crimes, kStart, 40, 1);
  CHECK(historical_density(c, 0, 3, 30, 30) == 1.0);
  CHECK(historical_density(c, 0, 2, 30, 30) == 0.0);
  CHECK(historical_density(c, 0, 3, 0, 7) == 0.0);

  std::vector<CrimeRecord> two_a_day;
  for (int d = 3; d < 10; ++d)
    for (int k = 0; k < 2; ++k) two_a_day.push_back({at_slot(d, 3, 10 + k), {}, "x", 0});
  const CrimeCounts c2(two_a_day, kStart, 11, 1);
  CHECK(historical_density(c2, 0, 3, 10, 7) == 2.0);
  // The target day itself never counts.
  CHECK(historical_density(c2, 0, 3, 9, 7) == doctest::Approx(12.0 / 7.0));
  CHECK(recent_importance(c2, 0, 3, 10) == 2.0);
  CHECK_THROWS(historical_density(c2, 0, 3, 10, 0));
}

TEST_CASE("poi features") {
  const std::vector<std::string> cats = {"bar", "cafe", "park"};
  std::vector<PoiRecord> same = {
      {"a", {}, "cafe", 0}, {"b", {}, "cafe", 0}, {"c", {}, "cafe", 0}, {"d", {}, "cafe", 0}};
  const auto f = poi_features(same, 0, 1e6, cats);
  CHECK(f.distribution[1] == 1.0);
  CHECK(f.distribution[0] == 0.0);
  CHECK(f.diversity == 0.0);
  CHECK(f.density == 4.0);

  std::vector<PoiRecord> pair = {{"a", {}, "bar", 0}, {"b", {}, "park", 0}};
  CHECK(poi_features(pair, 0, 1e6, cats).diversity == doctest::Approx(1.0).epsilon(1e-15));

  std::vector<PoiRecord> ten;
  for (int i = 0; i < 10; ++i) ten.push_back({std::to_string(i), {}, cats[static_cast<std::size_t>(i % 3)], 0});
  const auto t = poi_features(ten, 0, 1e6, cats);
  CHECK(t.density == 10.0);
  CHECK(t.diversity == doctest::Approx(oracle::entropy_bits({4, 3, 3})).epsilon(1e-12));

  const auto none = poi_features(ten, 1, 1e6, cats);
  CHECK(none.density == 0.0);
  CHECK(none.diversity == 0.0);
  CHECK(none.distribution.sum() == 0.0);
}

TEST_CASE("mobility features") {
  SUBCASE("two users, one check-in each") {
    std::vector<CheckinRecord> c = {checkin(1, 4, "u1", "v1"), checkin(1, 4, "u2", "v2")};
    const auto f = mobility_features(c, kStart, 0, {1, 4});
    CHECK(f.visitor_entropy == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(f.user_count == 2);
    CHECK(f.visitor_homogeneity == 0.0);
    CHECK(f.visitor_ratio == 1.0);
    CHECK(f.region_popularity == 1.0);
  }
  SUBCASE("one user, five check-ins") {
    std::vector<CheckinRecord> c;
    for (int i = 0; i < 5; ++i) c.push_back(checkin(1, 4, "u1", "v" + std::to_string(i % 2)));
    c.push_back(checkin(1, 4, "u9", "w", 1));
    const auto f = mobility_features(c, kStart, 0, {1, 4});
    CHECK(f.visitor_entropy == 0.0);
    CHECK(f.visitor_homogeneity == 1.0);
    CHECK(f.user_count == 1);
    CHECK(f.observation_frequency == 5);
    CHECK(f.region_popularity == doctest::Approx(5.0 / 6.0));
  }
  SUBCASE("returning visitors are not new") {
    std::vector<CheckinRecord> c = {checkin(0, 4, "u1", "v1"), checkin(1, 4, "u1", "v1"),
                                    checkin(1, 4, "u2", "v1")};
    const auto f = mobility_features(c, kStart, 0, {1, 4});
    CHECK(f.visitor_ratio == 0.5);
    CHECK(f.visitor_homogeneity == doctest::Approx(1.0));
  }
  SUBCASE("no check-ins") {
    const auto f = mobility_features({}, kStart, 0, {1, 4});
    CHECK(f.user_count == 0);
    CHECK(f.visitor_entropy == 0.0);
    CHECK(f.visitor_ratio == 0.0);
  }
}

TEST_CASE("extractor agrees with the free functions") {
  SyntheticParams p;
  p.start = kStart;
  p.n_days = 10;
  p.checkin_rate = 400;
  const auto s = generate_synthetic(p, 21).scenario;
  const FeatureExtractor fx(s);
  const CrimeCounts counts(s.crimes, s.start, s.n_days(), static_cast<int>(s.grid.size()));
  int compared = 0;
  for (NodeId v = 0; v < static_cast<NodeId>(s.grid.size()); v += 7)
    for (int day : {2, 8})
      for (int slot : {4, 6}) {
        const auto row = fx.row(v, {day, slot});
        const auto m = mobility_features(s.checkins, s.start, v, {day, slot});
        CHECK(row.mobility.visitor_entropy == doctest::Approx(m.visitor_entropy).epsilon(1e-12));
        CHECK(row.mobility.visitor_homogeneity == doctest::Approx(m.visitor_homogeneity).epsilon(1e-12));
        CHECK(row.mobility.visitor_ratio == m.visitor_ratio);
        CHECK(row.mobility.region_popularity == m.region_popularity);
        CHECK(row.h2 == historical_density(counts, v, slot, day, 7));
        CHECK(row.values().size() == static_cast<Eigen::Index>(feature_names(fx.categories()).size()));
        ++compared;
      }
  CHECK(compared > 0);
  std::ostringstream out;
  const auto rows = fx.rows(1, 2);
  write_features_csv(out, rows, fx.categories());
  const std::string text = out.str();
  CHECK(std::count(text.begin(), text.end(), '\n') == static_cast<long>(rows.size() + 1));
}

TEST_CASE("undersample") {
  std::vector<FeatureRow> rows;
  for (int i = 0; i < 10; ++i) rows.push_back(labelled(Label::Crime, i));
  for (int i = 0; i < 90; ++i) rows.push_back(labelled(Label::NoCrime, 100 + i));
  const auto a = undersample(rows, 4);
  CHECK(a.size() == 20);
  CHECK(std::count_if(a.begin(), a.end(), [](const FeatureRow& r) { return r.label == Label::Crime; }) == 10);
  const auto b = undersample(rows, 4);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].node == b[i].node);
  CHECK(std::is_sorted(a.begin(), a.end(), [](const FeatureRow& x, const FeatureRow& y) { return x.node < y.node; }));

  std::vector<FeatureRow> even(rows.begin(), rows.begin() + 20);
  const auto same = undersample(even, 1);
  REQUIRE(same.size() == 20);
  for (std::size_t i = 0; i < 20; ++i) CHECK(same[i].node == even[i].node);

  std::vector<FeatureRow> calm(rows.begin() + 10, rows.end());
  CHECK_THROWS(undersample(calm, 1));
}
