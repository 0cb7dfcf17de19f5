#pragma once

#include <memory>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "patrol/domain.hpp"

namespace patrol {

/// An officer available for planning, located at `position` from `ready_at` on.
struct PlanOfficer {
  OfficerId id = 0;
  LatLon position;
  double ready_at = 0.0;  // minutes since epoch
  // Grid cell the officer stands on, when known; enables `TravelTable` lookups.
  std::optional<NodeId> at_node;
};

/// Precomputed travel minutes between every pair of grid cells.
class TravelTable {
 public:
  TravelTable(const std::vector<PatrolNode>& cells, double speed_mps);
  double operator()(NodeId a, NodeId b) const { return minutes_(a, b); }
  Eigen::Index size() const { return minutes_.rows(); }

 private:
  Eigen::MatrixXd minutes_;
};

/// One planning round: the nodes to cover, the idle officers and the clock.
/// Nodes and officers are addressed by their index in this problem.
class PlanningProblem {
 public:
  PlanningProblem(std::vector<PatrolNode> nodes, std::vector<PlanOfficer> officers, double clock,
                  double horizon_end, double speed_mps, std::shared_ptr<const TravelTable> table = nullptr);

  const std::vector<PatrolNode>& nodes() const { return nodes_; }
  const std::vector<PlanOfficer>& officers() const { return officers_; }
  int n_nodes() const { return static_cast<int>(nodes_.size()); }
  int n_officers() const { return static_cast<int>(officers_.size()); }
  double clock() const { return clock_; }
  double horizon_end() const { return horizon_end_; }
  double speed() const { return speed_; }

  double node_travel(int from, int to) const { return node_travel_(from, to); }
  double officer_travel(int officer, int node) const { return officer_travel_(officer, node); }
  double benefit(int node) const { return benefit_[static_cast<std::size_t>(node)]; }

  /// Share of node `node`'s benefit earned when arriving at `arrival`.
  double arrival_factor(int node, double arrival) const;

 private:
  std::vector<PatrolNode> nodes_;
  std::vector<PlanOfficer> officers_;
  double clock_;
  double horizon_end_;
  double speed_;
  Eigen::MatrixXd node_travel_;
  Eigen::MatrixXd officer_travel_;
  std::vector<double> benefit_;
};

/// Ordered node indices per officer index.
using Tours = std::vector<std::vector<int>>;

struct Stop {
  int node = 0;
  double arrival = 0.0;
  double departure = 0.0;
};

/// Per-officer sub-tours with projected arrival and departure times.
struct RoutePlan {
  std::vector<std::vector<Stop>> tours;

  std::size_t stop_count() const;
};

/// Arrival times: each leg starts when the previous stay ends.
RoutePlan schedule(const PlanningProblem& problem, const Tours& tours);

}  // namespace patrol
