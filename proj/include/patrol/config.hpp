#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "patrol/eval.hpp"
#include "patrol/optimize.hpp"
#include "patrol/predict.hpp"
#include "patrol/synthetic.hpp"

namespace patrol {

inline constexpr int kConfigVersion = 1;

struct DataPaths {
  std::filesystem::path crimes;
  std::filesystem::path checkins;
  std::filesystem::path pois;
  std::filesystem::path calls;
};

struct DateRange {
  Minutes start = 0;
  Minutes end = 0;  // exclusive, midnight
};

enum class PredictorKind { Forest, Density };

/// Everything a command needs, read from one JSON document. Relative paths
/// are resolved against the document's directory.
struct RunConfig {
  int config_version = kConfigVersion;
  std::uint64_t seed = 1;

  std::optional<DataPaths> data;
  std::optional<SyntheticParams> synthetic;

  BBox bbox = SyntheticParams{}.bbox;
  int rows = 2;
  int cols = 47;
  int slot_minutes = kSlotMinutes;

  DateRange train;
  DateRange test;

  PredictorKind predictor = PredictorKind::Forest;
  ForestParams forest;
  double vote_threshold = 0.5;
  std::optional<std::filesystem::path> hotspots;  // precomputed map, skips prediction

  double speed_mps = 1.2;
  double stay_minutes = 10.0;
  double emergency_stay_minutes = 10.0;
  int shift_start_minute = 8 * 60;
  int shift_end_minute = 20 * 60;
  double salary_rho = 0.0;

  std::vector<PlannerKind> planners{kAllPlanners.begin(), kAllPlanners.end()};
  std::vector<int> officer_counts{5, 10, 15, 20, 25, 30};
  int runs = 5;
  std::vector<Grouping> groupings{Grouping::Weekly, Grouping::Monthly};

  OptimizerParams optimizer;

  /// Throws ConfigError when ranges overlap, files are missing or values are out of range.
  void validate() const;
  /// Whole data period: earliest start to latest end of the two ranges.
  DateRange period() const;
};

/// Parses and validates; throws ConfigError with a readable message.
RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);

}  // namespace patrol
