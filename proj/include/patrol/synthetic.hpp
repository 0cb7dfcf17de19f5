#pragma once

#include <cstdint>
#include <vector>

#include "patrol/ingest.hpp"

namespace patrol {

struct SyntheticParams {
  BBox bbox{47.600, -122.360, 47.604, -122.280};
  int rows = 2;
  int cols = 47;
  Minutes start = 0;  // first day (truncated to midnight)
  int n_days = 28;
  double crime_rate = 0.03;      // mean crimes per node per 2-hour slot
  double call_rate = 30.0;       // mean emergency calls per day
  double checkin_rate = 60.0;    // mean check-ins per day
  int n_users = 300;
  int n_venues = 400;
  double hotspot_fraction = 0.2;  // share of nodes that are persistent hotspots
  double hotspot_share = 0.8;     // share of crime intensity they carry
  int call_start_minute = 8 * 60;
  int call_end_minute = 20 * 60;
};

struct SyntheticScenario {
  Scenario scenario;
  std::vector<NodeId> hot_nodes;          // generating hotspot class, sorted
  std::vector<double> intensity;          // crime intensity per node-slot
};

/// Reproducible Poisson scenario: same params and seed give identical records.
SyntheticScenario generate_synthetic(const SyntheticParams& params, std::uint64_t seed);

}  // namespace patrol
