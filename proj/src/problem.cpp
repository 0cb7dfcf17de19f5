#include "patrol/problem.hpp"

#include <stdexcept>

namespace patrol {

TravelTable::TravelTable(const std::vector<PatrolNode>& cells, double speed_mps) {
  const auto n = static_cast<Eigen::Index>(cells.size());
  minutes_.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    minutes_(i, i) = 0.0;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      if (cells[i].id != i || cells[j].id != j) throw std::invalid_argument("travel table needs cells in id order");
      minutes_(i, j) = minutes_(j, i) = travel_minutes(cells[i].centroid, cells[j].centroid, speed_mps);
    }
  }
}

PlanningProblem::PlanningProblem(std::vector<PatrolNode> nodes, std::vector<PlanOfficer> officers, double clock,
                                 double horizon_end, double speed_mps, std::shared_ptr<const TravelTable> table)
    : nodes_(std::move(nodes)), officers_(std::move(officers)), clock_(clock), horizon_end_(horizon_end),
      speed_(speed_mps) {
  if (!(speed_mps > 0.0)) throw ConfigError("travel speed must be positive");
  const auto n = static_cast<Eigen::Index>(nodes_.size());
  const auto m = static_cast<Eigen::Index>(officers_.size());
  auto in_table = [&](NodeId id) { return table && id >= 0 && id < table->size(); };

  node_travel_.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    node_travel_(i, i) = 0.0;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const auto& a = nodes_[i];
      const auto& b = nodes_[j];
      node_travel_(i, j) = node_travel_(j, i) = in_table(a.id) && in_table(b.id)
                                                    ? (*table)(a.id, b.id)
                                                    : travel_minutes(a.centroid, b.centroid, speed_);
    }
  }
  officer_travel_.resize(m, n);
  for (Eigen::Index o = 0; o < m; ++o) {
    const auto& officer = officers_[o];
    for (Eigen::Index j = 0; j < n; ++j) {
      const bool cached = officer.at_node && in_table(*officer.at_node) && in_table(nodes_[j].id);
      officer_travel_(o, j) = cached ? (*table)(*officer.at_node, nodes_[j].id)
                                     : travel_minutes(officer.position, nodes_[j].centroid, speed_);
    }
  }
  benefit_.reserve(nodes_.size());
  for (const auto& node : nodes_) benefit_.push_back(patrol::benefit(node));
}

double PlanningProblem::arrival_factor(int node, double arrival) const {
  if (arrival > horizon_end_) return 0.0;
  const auto& n = nodes_[static_cast<std::size_t>(node)];
  if (n.state == NodeState::Emergency && n.call_time)
    return arrival_multiplier(std::max(0.0, arrival - *n.call_time), n.priority);
  return 1.0;
}

std::size_t RoutePlan::stop_count() const {
  std::size_t count = 0;
  for (const auto& t : tours) count += t.size();
  return count;
}

RoutePlan schedule(const PlanningProblem& problem, const Tours& tours) {
  if (static_cast<int>(tours.size()) != problem.n_officers())
    throw std::invalid_argument("one tour per officer expected");
  RoutePlan plan;
  plan.tours.resize(tours.size());
  for (std::size_t o = 0; o < tours.size(); ++o) {
    double t = problem.officers()[o].ready_at;
    int prev = -1;
    for (int node : tours[o]) {
      const double leg = prev < 0 ? problem.officer_travel(static_cast<int>(o), node) : problem.node_travel(prev, node);
      const double arrival = t + leg;
      const double departure = arrival + problem.nodes()[static_cast<std::size_t>(node)].stay_minutes;
      plan.tours[o].push_back({node, arrival, departure});
      t = departure;
      prev = node;
    }
  }
  return plan;
}

}  // namespace patrol
