#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "oracles.hpp"
#include "patrol/optimize.hpp"

using namespace patrol;

namespace {

constexpr double kLon = -122.33;
// Meridian distance of 720 m, ten minutes at 1.2 m/s.
const double kTenMinutesLat = 720.0 / (6371008.8 * M_PI / 180.0);

PatrolNode make_node(NodeId id, double lat, NodeState state, int priority = 1, double call_time = 0.0) {
  PatrolNode n;
  n.id = id;
  n.centroid = {lat, kLon};
  n.state = state;
  if (state == NodeState::Emergency) {
    n.priority = priority;
    n.call_time = call_time;
  }
  return n;
}

PlanOfficer make_officer(OfficerId id, double lat) { return {id, {lat, kLon}, 0.0, std::nullopt}; }

std::multiset<int> covered(const Tours& tours) {
  std::multiset<int> s;
  for (const auto& t : tours) s.insert(t.begin(), t.end());
  return s;
}

bool non_decreasing(const std::vector<double>& h) { return std::is_sorted(h.begin(), h.end()); }

}  // namespace

TEST_CASE("fitness of single emergency visits") {
  const PlanningProblem empty({}, {make_officer(0, 47.6)}, 0.0, 720.0, 1.2);
  CHECK(fitness(RoutePlan{{{}}}, empty).value == 0.0);

  for (auto [legs, expected] : {std::pair{1.0, 5 * std::exp(4.0)}, std::pair{2.0, 0.0}}) {
    const PlanningProblem p({make_node(0, 47.6 + legs * kTenMinutesLat, NodeState::Emergency, 5)},
                            {make_officer(0, 47.6)}, 0.0, 720.0, 1.2);
    const Chromosome c({{EntityKind::Officer, 0, 0.9, KeyBand::Full}, {EntityKind::Node, 0, 0.5, KeyBand::Full}},
                       false);
    const auto score = fitness(decode(c, p), p);
    CHECK(score.value == doctest::Approx(expected).epsilon(1e-9));
    CHECK(fitness_of(c, p) == score.value);
    CHECK(score.per_officer.size() == 1);
  }
}

TEST_CASE("horizon cuts late arrivals") {
  const PlanningProblem p({make_node(0, 47.6 + kTenMinutesLat, NodeState::Hotspot)}, {make_officer(0, 47.6)}, 0.0,
                          9.0, 1.2);
  const auto score = fitness(schedule(p, {{0}}), p);
  CHECK(score.value == 0.0);
  CHECK(score.reachable == 0);
}

TEST_CASE("net objective") {
  CHECK(net_objective(100.0, 5, 0.0) == 100.0);
  CHECK(net_objective(100.0, 5, 10.0) == 50.0);
  CHECK(net_objective(100.0, 6, 10.0) < net_objective(100.0, 5, 10.0));
  CHECK_THROWS(net_objective(1.0, 1, -1.0));
}

TEST_CASE("fitness scales with benefits") {
  auto p = oracle::random_instance(3, 6, 2);
  Rng rng(2);
  const auto c = encode_lerk(p, rng);
  std::vector<PatrolNode> nodes = p.nodes();
  for (auto& n : nodes) n.importance += std::log(3.0);
  const PlanningProblem scaled(nodes, p.officers(), p.clock(), p.horizon_end(), p.speed());
  CHECK(fitness_of(c, scaled) == doctest::Approx(3.0 * fitness_of(c, p)).epsilon(1e-12));
  CHECK(fitness_of(c, p) == fitness_of(c, p));
  CHECK(fitness_of(c, p) == doctest::Approx(oracle::plan_value(p, c.tours(2))).epsilon(1e-9));
}

TEST_CASE("crossover") {
  const auto p = oracle::random_instance(5, 7, 3);
  Rng rng(9);
  const auto x = encode_glerk(p, rng);
  CHECK(crossover(x, x, rng).tours(3) == x.tours(3));
  for (int i = 0; i < 1000; ++i) {
    const auto mom = i % 2 ? encode_glerk(p, rng) : encode_lerk(p, rng);
    const auto dad = i % 2 ? encode_glerk(p, rng) : encode_lerk(p, rng);
    const auto child = crossover(mom, dad, rng);
    CHECK(check_invariants(child, p).empty());
    CHECK(covered(child.tours(3)) == std::multiset<int>{0, 1, 2, 3, 4, 5, 6});
  }
  const auto other = oracle::random_instance(5, 6, 3);
  CHECK_THROWS_AS(crossover(x, encode_glerk(other, rng), rng), std::invalid_argument);
  CHECK_THROWS_AS(crossover(x, encode_lerk(p, rng), rng), std::invalid_argument);
}

TEST_CASE("levy steps") {
  Rng rng(17);
  CHECK(levy_step(rng, 1.0, 0.0) == 0.0);
  CHECK_THROWS(levy_step(rng, 0.0, 0.05));
  CHECK_THROWS(levy_step(rng, 2.5, 0.05));
  const int n = 100000;
  double sign = 0, m2 = 0, m4 = 0;
  for (int i = 0; i < n; ++i) {
    // Exponent 1.5 keeps the fourth moment estimate finite enough to read.
    const double s = levy_step(rng, 1.5, 1.0);
    sign += (s > 0) - (s < 0);
    m2 += s * s;
    m4 += s * s * s * s;
  }
  CHECK(std::abs(sign / n) < 0.01);
  m2 /= n;
  m4 /= n;
  CHECK(m4 / (m2 * m2) - 3.0 > 0.0);

  const auto p = oracle::random_instance(8, 6, 2);
  const auto c = encode_glerk(p, rng);
  for (int i = 0; i < 200; ++i) CHECK(check_invariants(levy_flight(c, rng, 0.5, 1.0), p).empty());
}

TEST_CASE("optimizers on tiny instances") {
  OptimizerParams params;
  params.population_size = 20;
  params.max_iterations = 30;
  const PlanningProblem one({make_node(0, 47.601, NodeState::Hotspot)}, {make_officer(0, 47.6)}, 0.0, 720.0, 1.2);
  for (auto init : {InitScheme::Guided, InitScheme::Random}) {
    Rng rng(1);
    const auto ga = ga_optimize(one, params, init, rng);
    CHECK(ga.best.tours(1)[0] == std::vector<int>{0});
    CHECK(ga.best_fitness == doctest::Approx(std::exp(2.0)));
    const auto cs = cs_optimize(one, params, init, rng);
    CHECK(cs.best_fitness == doctest::Approx(std::exp(2.0)));
  }
}

TEST_CASE("optimizers reach the brute-force optimum on six nodes") {
  OptimizerParams params;
  params.population_size = 60;
  params.max_iterations = 150;
  const auto p = oracle::random_instance(42, 6, 2);
  const double best = oracle::brute_force_optimum(p);
  REQUIRE(best > 0.0);
  Rng rng(6);
  const auto ga = ga_optimize(p, params, InitScheme::Guided, rng);
  const auto cs = cs_optimize(p, params, InitScheme::Guided, rng);
  CHECK(ga.best_fitness == doctest::Approx(best).epsilon(1e-9));
  CHECK(cs.best_fitness == doctest::Approx(best).epsilon(1e-9));
  CHECK(ga.history.size() == 150);
  CHECK(non_decreasing(ga.history));
  CHECK(non_decreasing(cs.history));
  CHECK(ga.history.back() == ga.best_fitness);
}

TEST_CASE("identical optimal nests keep the best") {
  OptimizerParams params;
  params.population_size = 10;
  params.max_iterations = 20;
  params.levy_alpha = 0.0;
  const PlanningProblem p({make_node(0, 47.601, NodeState::Hotspot)}, {make_officer(0, 47.6)}, 0.0, 720.0, 1.2);
  Rng rng(3);
  const auto cs = cs_optimize(p, params, InitScheme::Guided, rng);
  for (double h : cs.history) CHECK(h == cs.best_fitness);
}

TEST_CASE("optimizer parameter validation") {
  OptimizerParams p;
  CHECK_NOTHROW(p.validate());
  p.population_size = 0;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p = {};
  p.abandon_rate = 1.5;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p = {};
  p.levy_exponent = 3.0;
  CHECK_THROWS_AS(p.validate(), ConfigError);
}

TEST_CASE("importance greedy") {
  SUBCASE("one officer takes every node") {
    const PlanningProblem p({make_node(0, 47.601, NodeState::Hotspot), make_node(1, 47.602, NodeState::Coldspot)},
                            {make_officer(0, 47.6)}, 0.0, 720.0, 1.2);
    const auto a = imp_greedy(p);
    CHECK(a.tours[0] == std::vector<int>{0, 1});
  }
  SUBCASE("equal officers: lower id wins") {
    const PlanningProblem p({make_node(0, 47.601, NodeState::Hotspot)},
                            {make_officer(5, 47.6), make_officer(2, 47.6)}, 0.0, 720.0, 1.2);
    CHECK(imp_greedy(p).officer_of[0] == 1);
  }
  SUBCASE("three nodes, two officers") {
    // Benefits: emergency 4e^4, hotspot e^2, coldspot 1. The emergency call is
    // 5 minutes old, so the far officer (arriving 18.9 min after the call)
    // earns nothing at priority 4; the hotspot goes to the officer one block
    // away; the coldspot goes to the officer projected to arrive sooner.
    const PlanningProblem p({make_node(0, 47.609, NodeState::Hotspot),
                             make_node(1, 47.601, NodeState::Emergency, 4, -5.0),
                             make_node(2, 47.604, NodeState::Coldspot)},
                            {make_officer(0, 47.600), make_officer(1, 47.610)}, 0.0, 720.0, 1.2);
    const auto a = imp_greedy(p);
    CHECK(a.officer_of == std::vector<int>{1, 0, 0});
    CHECK(a.tours[0] == std::vector<int>{1, 2});
    CHECK(a.tours[1] == std::vector<int>{0});
    CHECK(a.officer_of == oracle::imp_greedy_trace(p));
  }
  SUBCASE("officer list order does not matter") {
    const auto p = oracle::random_instance(12, 7, 3);
    auto officers = p.officers();
    std::reverse(officers.begin(), officers.end());
    const PlanningProblem r(p.nodes(), officers, p.clock(), p.horizon_end(), p.speed());
    const auto a = imp_greedy(p);
    const auto b = imp_greedy(r);
    for (std::size_t v = 0; v < a.officer_of.size(); ++v)
      CHECK(p.officers()[static_cast<std::size_t>(a.officer_of[v])].id ==
            r.officers()[static_cast<std::size_t>(b.officer_of[v])].id);
  }
  SUBCASE("no officers") {
    const PlanningProblem p({make_node(0, 47.601, NodeState::Hotspot)}, {}, 0.0, 720.0, 1.2);
    CHECK(imp_greedy(p).tours.empty());
    CHECK(dis_greedy(p).officer_of[0] == -1);
  }
}

TEST_CASE("distance greedy") {
  SUBCASE("node under an officer") {
    const PlanningProblem p({make_node(0, 47.605, NodeState::Coldspot)},
                            {make_officer(0, 47.6), make_officer(1, 47.605)}, 0.0, 720.0, 1.2);
    CHECK(dis_greedy(p).officer_of[0] == 1);
  }
  SUBCASE("single node goes to the nearest officer") {
    const PlanningProblem p({make_node(0, 47.603, NodeState::Hotspot)},
                            {make_officer(0, 47.6), make_officer(1, 47.609), make_officer(2, 47.604)}, 0.0,
                            720.0, 1.2);
    CHECK(dis_greedy(p).officer_of[0] == 2);
  }
  SUBCASE("matches a pairwise table walk") {
    const auto p = oracle::random_instance(77, 8, 3);
    // Reference: repeatedly take the globally shortest leg from each officer's last stop.
    std::vector<int> last(3, -1), owner(8, -1);
    for (int k = 0; k < 8; ++k) {
      int bo = -1, bv = -1;
      double bl = 0;
      for (int o = 0; o < 3; ++o)
        for (int v = 0; v < 8; ++v) {
          if (owner[static_cast<std::size_t>(v)] >= 0) continue;
          const auto from = last[static_cast<std::size_t>(o)];
          const double leg = from < 0 ? p.officer_travel(o, v) : p.node_travel(from, v);
          if (bo < 0 || leg < bl) bo = o, bv = v, bl = leg;
        }
      owner[static_cast<std::size_t>(bv)] = bo;
      last[static_cast<std::size_t>(bo)] = bv;
    }
    CHECK(dis_greedy(p).officer_of == owner);
  }
}

TEST_CASE("every planner returns a partition") {
  OptimizerParams params;
  params.population_size = 10;
  params.max_iterations = 10;
  const auto p = oracle::random_instance(31, 8, 3);
  for (auto kind : kAllPlanners) {
    Rng rng(4);
    const auto tours = plan_routes(kind, p, params, rng);
    CHECK(tours.size() == 3);
    CHECK(covered(tours) == std::multiset<int>{0, 1, 2, 3, 4, 5, 6, 7});
    CHECK(parse_planner(to_string(kind)) == kind);
  }
  CHECK_THROWS_AS(parse_planner("astar"), ConfigError);
}
