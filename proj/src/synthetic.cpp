#include "patrol/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "patrol/timeutil.hpp"

namespace patrol {

namespace {

const std::vector<std::string>& offense_types() {
  static const std::vector<std::string> types = {"THEFT", "BURGLARY", "ASSAULT", "VEHICLE THEFT", "ROBBERY",
                                                 "PROPERTY DAMAGE", "NARCOTICS"};
  return types;
}

const std::vector<std::string>& venue_categories() {
  static const std::vector<std::string> categories = {"Food", "Nightlife", "Shop", "Office", "Residence",
                                                      "Outdoors", "Transport", "Arts"};
  return categories;
}

LatLon point_in(const GridMap& grid, NodeId node, std::mt19937_64& rng) {
  const BBox box = grid.extent(node);
  // Keep clear of cell edges so points bin back to `node`.
  std::uniform_real_distribution<double> u(0.02, 0.98);
  return {box.min_lat + u(rng) * (box.max_lat - box.min_lat), box.min_lon + u(rng) * (box.max_lon - box.min_lon)};
}

}  // namespace

SyntheticScenario generate_synthetic(const SyntheticParams& params, std::uint64_t seed) {
  if (params.crime_rate < 0 || params.call_rate < 0 || params.checkin_rate < 0 || params.n_days < 1)
    throw ConfigError("synthetic rates must be non-negative and n_days >= 1");
  if (params.hotspot_fraction < 0 || params.hotspot_fraction > 1 || params.hotspot_share < 0 ||
      params.hotspot_share > 1)
    throw ConfigError("hotspot fraction and share must lie in [0, 1]");

  std::mt19937_64 rng(seed);
  GridMap grid = build_grid(params.bbox, params.rows, params.cols);
  const int n = static_cast<int>(grid.size());
  const Minutes start = day_number(params.start) * kMinutesPerDay;

  std::vector<NodeId> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  const int n_hot = static_cast<int>(std::lround(params.hotspot_fraction * n));
  std::vector<NodeId> hot(order.begin(), order.begin() + n_hot);
  std::sort(hot.begin(), hot.end());

  std::vector<double> intensity(n, params.crime_rate);
  if (n_hot > 0 && n_hot < n) {
    const double total = params.crime_rate * n;
    const double hot_rate = params.hotspot_share * total / n_hot;
    const double cold_rate = (1.0 - params.hotspot_share) * total / (n - n_hot);
    std::fill(intensity.begin(), intensity.end(), cold_rate);
    for (NodeId h : hot) intensity[h] = hot_rate;
  }

  std::vector<CrimeRecord> crimes;
  std::uniform_int_distribution<int> in_slot(0, kSlotMinutes - 1);
  std::uniform_int_distribution<std::size_t> pick_offense(0, offense_types().size() - 1);
  for (int d = 0; d < params.n_days; ++d) {
    for (int s = 0; s < kSlotsPerDay; ++s) {
      for (NodeId v = 0; v < n; ++v) {
        if (intensity[v] <= 0) continue;
        std::poisson_distribution<int> count(intensity[v]);
        for (int k = count(rng); k > 0; --k) {
          const Minutes t = start + d * kMinutesPerDay + s * kSlotMinutes + in_slot(rng);
          crimes.push_back({t, point_in(grid, v, rng), offense_types()[pick_offense(rng)], v});
        }
      }
    }
  }

  // Calls follow the same spatial intensity; priorities are uniform over 1..5.
  std::vector<CallRecord> calls;
  std::discrete_distribution<NodeId> pick_node(intensity.begin(), intensity.end());
  const bool any_intensity = std::any_of(intensity.begin(), intensity.end(), [](double x) { return x > 0; });
  std::uniform_int_distribution<NodeId> uniform_node(0, n - 1);
  std::uniform_int_distribution<int> call_minute(params.call_start_minute,
                                                 std::max(params.call_start_minute, params.call_end_minute - 1));
  std::uniform_int_distribution<int> pick_priority(1, 5);
  if (params.call_rate > 0) {
    std::poisson_distribution<int> per_day(params.call_rate);
    for (int d = 0; d < params.n_days; ++d) {
      for (int k = per_day(rng); k > 0; --k) {
        const NodeId v = any_intensity ? pick_node(rng) : uniform_node(rng);
        const Minutes t = start + d * kMinutesPerDay + call_minute(rng);
        const auto& types = call_types_for(pick_priority(rng));
        std::uniform_int_distribution<std::size_t> pick_type(0, types.size() - 1);
        calls.push_back({t, point_in(grid, v, rng), types[pick_type(rng)], v});
      }
    }
  }

  // Half the venues cluster where crime is dense, half are spread uniformly.
  std::vector<PoiRecord> pois;
  std::uniform_int_distribution<std::size_t> pick_category(0, venue_categories().size() - 1);
  for (int i = 0; i < params.n_venues; ++i) {
    const NodeId v = (i % 2 == 0 && any_intensity) ? pick_node(rng) : uniform_node(rng);
    pois.push_back({"v" + std::to_string(i), point_in(grid, v, rng), venue_categories()[pick_category(rng)], v});
  }

  std::vector<CheckinRecord> checkins;
  if (params.checkin_rate > 0 && !pois.empty() && params.n_users > 0) {
    std::vector<double> popularity(pois.size());
    for (std::size_t i = 0; i < pois.size(); ++i) popularity[i] = 1.0 / static_cast<double>(1 + i % 50);
    std::discrete_distribution<std::size_t> pick_venue(popularity.begin(), popularity.end());
    std::uniform_int_distribution<int> pick_user(0, params.n_users - 1);
    std::uniform_int_distribution<int> checkin_minute(7 * 60, 24 * 60 - 1);
    std::poisson_distribution<int> per_day(params.checkin_rate);
    for (int d = 0; d < params.n_days; ++d) {
      for (int k = per_day(rng); k > 0; --k) {
        const auto& venue = pois[pick_venue(rng)];
        const Minutes t = start + d * kMinutesPerDay + checkin_minute(rng);
        checkins.push_back({t, venue.pos, "u" + std::to_string(pick_user(rng)), venue.venue_id, venue.node});
      }
    }
  }

  SyntheticScenario out;
  out.scenario = make_scenario(std::move(grid), std::move(crimes), std::move(checkins), std::move(pois),
                               std::move(calls), start, start + params.n_days * kMinutesPerDay);
  out.hot_nodes = std::move(hot);
  out.intensity = std::move(intensity);
  return out;
}

}  // namespace patrol
