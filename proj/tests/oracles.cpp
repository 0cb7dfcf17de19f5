#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <random>

namespace oracle {

using patrol::NodeState;

double benefit(double importance, int priority, NodeState state) {
  const double lambda = state == NodeState::Emergency ? 4.0 : state == NodeState::Hotspot ? 2.0 : 0.0;
  return std::exp(importance) * priority * std::exp(lambda);
}

double multiplier(double delay, int priority) {
  static const double table[4][5] = {
      // priority 5, 4, 3, 2, 1
      {1, 1, 1, 1, 1},
      {0, 0, 0.8, 0.8, 0.8},
      {0, 0, 0, 0.6, 0.6},
      {0, 0, 0, 0, 0.5},
  };
  const int row = delay < 15 ? 0 : delay <= 30 ? 1 : delay < 60 ? 2 : 3;
  return table[row][5 - priority];
}

double haversine_m(patrol::LatLon a, patrol::LatLon b) {
  const double r = 6371008.8;
  const double rad = M_PI / 180.0;
  const double dlat = (b.lat - a.lat) * rad;
  const double dlon = (b.lon - a.lon) * rad;
  const double h = std::pow(std::sin(dlat / 2), 2) + std::cos(a.lat * rad) * std::cos(b.lat * rad) * std::pow(std::sin(dlon / 2), 2);
  return 2 * r * std::asin(std::sqrt(h));
}

namespace {

double minutes_between(const patrol::PlanningProblem& p, patrol::LatLon a, patrol::LatLon b) {
  return haversine_m(a, b) / p.speed() / 60.0;
}

double node_value(const patrol::PlanningProblem& p, int v, double arrival) {
  const auto& n = p.nodes()[static_cast<std::size_t>(v)];
  const double b = benefit(n.importance, n.priority, n.state);
  if (arrival > p.horizon_end()) return 0.0;
  if (n.state == NodeState::Emergency) return b * multiplier(std::max(0.0, arrival - *n.call_time), n.priority);
  return b;
}

}  // namespace

double plan_value(const patrol::PlanningProblem& problem, const patrol::Tours& tours) {
  double total = 0.0;
  for (std::size_t o = 0; o < tours.size(); ++o) {
    double t = problem.officers()[o].ready_at;
    patrol::LatLon at = problem.officers()[o].position;
    for (int v : tours[o]) {
      const auto& n = problem.nodes()[static_cast<std::size_t>(v)];
      t += minutes_between(problem, at, n.centroid);
      total += node_value(problem, v, t);
      t += n.stay_minutes;
      at = n.centroid;
    }
  }
  return total;
}

double brute_force_optimum(const patrol::PlanningProblem& problem) {
  const int n = problem.n_nodes();
  const int m = problem.n_officers();
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  double best = 0.0;
  // Every permutation cut into m consecutive (possibly empty) pieces covers all ordered partitions.
  std::vector<int> cuts(static_cast<std::size_t>(std::max(0, m - 1)), 0);
  do {
    std::function<void(int, int)> place = [&](int k, int from) {
      if (k == m - 1) {
        patrol::Tours tours(static_cast<std::size_t>(m));
        int start = 0;
        for (int o = 0; o < m; ++o) {
          const int stop = o < m - 1 ? cuts[static_cast<std::size_t>(o)] : n;
          tours[static_cast<std::size_t>(o)].assign(perm.begin() + start, perm.begin() + stop);
          start = stop;
        }
        best = std::max(best, plan_value(problem, tours));
        return;
      }
      for (int c = from; c <= n; ++c) {
        cuts[static_cast<std::size_t>(k)] = c;
        place(k + 1, c);
      }
    };
    place(0, 0);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

std::vector<int> imp_greedy_trace(const patrol::PlanningProblem& problem) {
  const int n = problem.n_nodes();
  const int m = problem.n_officers();
  std::vector<double> value(static_cast<std::size_t>(n));
  for (int v = 0; v < n; ++v) {
    const auto& node = problem.nodes()[static_cast<std::size_t>(v)];
    value[static_cast<std::size_t>(v)] = benefit(node.importance, node.priority, node.state);
  }
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (value[static_cast<std::size_t>(a)] != value[static_cast<std::size_t>(b)])
      return value[static_cast<std::size_t>(a)] > value[static_cast<std::size_t>(b)];
    return a < b;
  });
  std::vector<int> officers(static_cast<std::size_t>(m));
  std::iota(officers.begin(), officers.end(), 0);
  std::sort(officers.begin(), officers.end(),
            [&](int a, int b) { return problem.officers()[a].id < problem.officers()[b].id; });

  std::vector<double> free_at(static_cast<std::size_t>(m));
  std::vector<int> last(static_cast<std::size_t>(m), -1);
  for (int o = 0; o < m; ++o) free_at[static_cast<std::size_t>(o)] = problem.officers()[o].ready_at;
  std::vector<int> owner(static_cast<std::size_t>(n), -1);
  for (int v : order) {
    int pick = -1;
    double pick_value = -1.0, pick_arrival = 0.0;
    for (int o : officers) {
      const auto so = static_cast<std::size_t>(o);
      const double leg = last[so] < 0 ? problem.officer_travel(o, v) : problem.node_travel(last[so], v);
      const double arrival = free_at[so] + leg;
      const double score = node_value(problem, v, arrival);
      const bool better = score > pick_value || (score == pick_value && arrival < pick_arrival);
      if (pick < 0 || better) {
        pick = o;
        pick_value = score;
        pick_arrival = arrival;
      }
    }
    owner[static_cast<std::size_t>(v)] = pick;
    free_at[static_cast<std::size_t>(pick)] = pick_arrival + problem.nodes()[static_cast<std::size_t>(v)].stay_minutes;
    last[static_cast<std::size_t>(pick)] = v;
  }
  return owner;
}

patrol::PlanningProblem random_instance(std::uint64_t seed, int n_nodes, int n_officers) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> lat(47.600, 47.615), lon(-122.340, -122.320), unit(0.0, 1.0);
  std::uniform_int_distribution<int> priority(1, 5);
  const double clock = 600.0;
  std::vector<patrol::PatrolNode> nodes;
  for (int v = 0; v < n_nodes; ++v) {
    patrol::PatrolNode node;
    node.id = v;
    node.centroid = {lat(rng), lon(rng)};
    const double r = unit(rng);
    node.state = r < 0.4 ? NodeState::Coldspot : r < 0.75 ? NodeState::Hotspot : NodeState::Emergency;
    node.importance = unit(rng);
    if (node.state == NodeState::Emergency) {
      node.priority = priority(rng);
      node.call_time = clock - 20.0 * unit(rng);
    }
    nodes.push_back(node);
  }
  std::vector<patrol::PlanOfficer> officers;
  for (int o = 0; o < n_officers; ++o) officers.push_back({o, {lat(rng), lon(rng)}, clock, std::nullopt});
  const double horizon = clock + 60.0 + 60.0 * unit(rng);
  return patrol::PlanningProblem(std::move(nodes), std::move(officers), clock, horizon, 1.2);
}

double entropy_bits(const std::vector<double>& counts) {
  double total = 0.0;
  for (double c : counts) total += c;
  double h = 0.0;
  for (double c : counts)
    if (c > 0) h -= (c / total) * std::log(c / total) / std::log(2.0);
  return h;
}

double mean_pairwise_cosine(const std::vector<std::vector<double>>& vectors) {
  if (vectors.size() == 1) return 1.0;
  if (vectors.empty()) return 0.0;
  double sum = 0.0;
  int pairs = 0;
  for (std::size_t i = 0; i < vectors.size(); ++i)
    for (std::size_t j = i + 1; j < vectors.size(); ++j) {
      double dot = 0, ni = 0, nj = 0;
      for (std::size_t k = 0; k < vectors[i].size(); ++k) {
        dot += vectors[i][k] * vectors[j][k];
        ni += vectors[i][k] * vectors[i][k];
        nj += vectors[j][k] * vectors[j][k];
      }
      sum += dot / std::sqrt(ni * nj);
      ++pairs;
    }
  return sum / pairs;
}

}  // namespace oracle
