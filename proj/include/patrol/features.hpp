#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "patrol/ingest.hpp"

namespace patrol {

/// Crime counts indexed by (day offset, slot, node) over a scenario.
class CrimeCounts {
 public:
  CrimeCounts() = default;
  CrimeCounts(std::span<const CrimeRecord> crimes, Minutes start, int n_days, int n_nodes);

  int at(int day, int slot, NodeId node) const;
  int n_days() const { return n_days_; }
  int n_nodes() const { return n_nodes_; }

 private:
  int n_days_ = 0;
  int n_nodes_ = 0;
  std::vector<int> counts_;
};

/// Mean crimes per day in `node` during `slot` over the `window_days` days
/// strictly before `day`. Days before the data start count as zero.
double historical_density(const CrimeCounts& counts, NodeId node, int slot, int day, int window_days);

/// Importance w_k(t): the same density over the previous three days.
double recent_importance(const CrimeCounts& counts, NodeId node, int slot, int day);

struct PoiFeatures {
  Eigen::VectorXd distribution;  // share of venues per category
  double density = 0.0;          // venues per km^2
  double diversity = 0.0;        // entropy of `distribution`, bits
};

PoiFeatures poi_features(std::span<const PoiRecord> pois, NodeId node, double cell_area_m2,
                         const std::vector<std::string>& categories);

struct MobilityFeatures {
  double visitor_entropy = 0.0;      // D1, bits
  double visitor_homogeneity = 0.0;  // D2, mean pairwise cosine similarity
  double region_popularity = 0.0;    // D3
  double visitor_ratio = 0.0;        // D4, new users per check-in
  int user_count = 0;
  int observation_frequency = 0;
};

/// Mobility features of `node` during `interval`. Check-ins before the interval
/// are used only to decide which visitors are new to the node.
MobilityFeatures mobility_features(std::span<const CheckinRecord> checkins, Minutes scenario_start, NodeId node,
                                   TimeInterval interval);

enum class Label : std::uint8_t { NoCrime = 0, Crime = 1 };

struct FeatureRow {
  NodeId node = kNoNode;
  TimeInterval interval;
  double h1 = 0.0;  // 30-day density
  double h2 = 0.0;  // 7-day density
  Eigen::VectorXd poi_distribution;
  double poi_density = 0.0;
  double location_diversity = 0.0;
  MobilityFeatures mobility;
  Label label = Label::NoCrime;

  /// Fixed-order feature vector, see `feature_names`.
  Eigen::VectorXd values() const;
};

/// Column names matching `FeatureRow::values()`.
std::vector<std::string> feature_names(const std::vector<std::string>& categories);

/// Scenario-wide categories in sorted order.
std::vector<std::string> category_universe(std::span<const PoiRecord> pois);

/// Batch feature computation over a scenario with pre-grouped records.
class FeatureExtractor {
 public:
  explicit FeatureExtractor(const Scenario& scenario);

  const std::vector<std::string>& categories() const { return categories_; }
  const CrimeCounts& crime_counts() const { return counts_; }

  FeatureRow row(NodeId node, TimeInterval interval) const;

  /// All node rows for days [day_begin, day_end) and the given slots.
  std::vector<FeatureRow> rows(int day_begin, int day_end, std::span<const int> slots) const;
  std::vector<FeatureRow> rows(int day_begin, int day_end) const;

 private:
  MobilityFeatures mobility(NodeId node, TimeInterval interval) const;

  const Scenario* scenario_;
  std::vector<std::string> categories_;
  CrimeCounts counts_;
  std::vector<PoiFeatures> poi_;
  // Check-in indices grouped by day*slots+slot, then by node.
  std::vector<std::unordered_map<NodeId, std::vector<std::size_t>>> by_interval_;
  std::vector<int> interval_totals_;
  // Earliest check-in time per (user, node).
  std::unordered_map<std::string, std::unordered_map<NodeId, Minutes>> first_seen_;
};

struct Dataset {
  Eigen::MatrixXd x;   // one row per sample
  std::vector<int> y;  // 1 = crime

  Eigen::Index size() const { return x.rows(); }
  Eigen::Index n_features() const { return x.cols(); }
};

Dataset to_dataset(std::span<const FeatureRow> rows);

/// Keeps every minority-class row and an equal-size uniform sample (without
/// replacement) of the majority class; surviving rows keep their input order.
std::vector<FeatureRow> undersample(std::span<const FeatureRow> rows, std::uint64_t seed);

void write_features_csv(std::ostream& out, std::span<const FeatureRow> rows,
                        const std::vector<std::string>& categories);

}  // namespace patrol
