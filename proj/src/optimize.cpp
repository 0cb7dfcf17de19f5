#include "patrol/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace patrol {

namespace {

void check_rate(double value, const char* name) {
  if (!(value >= 0.0 && value <= 1.0)) throw ConfigError(std::string(name) + " must lie in [0, 1]");
}

int rounded(double rate, int n) { return static_cast<int>(std::lround(rate * n)); }

struct Population {
  std::vector<Chromosome> members;
  std::vector<double> fit;

  void rank() {
    std::vector<std::size_t> order(members.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fit[a] > fit[b]; });
    std::vector<Chromosome> m;
    std::vector<double> f;
    m.reserve(order.size());
    f.reserve(order.size());
    for (auto i : order) {
      m.push_back(std::move(members[i]));
      f.push_back(fit[i]);
    }
    members = std::move(m);
    fit = std::move(f);
  }
};

Chromosome fresh(const PlanningProblem& problem, InitScheme init, Rng& rng) {
  return init == InitScheme::Guided ? encode_glerk(problem, rng) : encode_lerk(problem, rng);
}

Population initial(const PlanningProblem& problem, int n, InitScheme init, Rng& rng) {
  Population pop;
  for (int i = 0; i < n; ++i) {
    pop.members.push_back(fresh(problem, init, rng));
    pop.fit.push_back(fitness_of(pop.members.back(), problem));
  }
  pop.rank();
  return pop;
}

int officer_count(const Chromosome& c) {
  int m = 0;
  for (const auto& g : c.genes())
    if (g.kind == EntityKind::Officer) m = std::max(m, g.index + 1);
  return m;
}

struct NodeOrigin {
  KeyBand band = KeyBand::Full;
  int officer = -1;
  double key = 0.0;
  bool present = false;
};

std::vector<NodeOrigin> node_origins(const Chromosome& c, const std::vector<BandLayout>& bands) {
  int n = 0;
  for (const auto& g : c.genes())
    if (g.kind == EntityKind::Node) n = std::max(n, g.index + 1);
  std::vector<NodeOrigin> out(static_cast<std::size_t>(n));
  for (const auto& g : c.genes())
    if (g.kind == EntityKind::Node) out[static_cast<std::size_t>(g.index)] = {g.band, -1, g.key, true};
  for (const auto& layout : bands)
    for (std::size_t o = 0; o < layout.nodes_of.size(); ++o)
      for (int v : layout.nodes_of[o]) out[static_cast<std::size_t>(v)].officer = static_cast<int>(o);
  return out;
}

}  // namespace

void OptimizerParams::validate() const {
  if (population_size < 1) throw ConfigError("population_size must be at least 1");
  if (max_iterations < 0) throw ConfigError("max_iterations must be non-negative");
  check_rate(elitist_rate, "elitist_rate");
  check_rate(cross_rate, "cross_rate");
  check_rate(mutate_rate, "mutate_rate");
  check_rate(abandon_rate, "abandon_rate");
  check_rate(top_rate, "top_rate");
  check_rate(pre_fly, "pre_fly");
  check_rate(local_opt_probability, "local_opt_probability");
  if (elitist_rate + cross_rate + mutate_rate > 1.0 + 1e-12)
    throw ConfigError("elitist_rate + cross_rate + mutate_rate must not exceed 1");
  if (!(levy_alpha >= 0.0)) throw ConfigError("levy_alpha must be non-negative");
  if (!(levy_exponent > 0.0 && levy_exponent <= 2.0)) throw ConfigError("levy_exponent must lie in (0, 2]");
}

FitnessScore fitness(const RoutePlan& plan, const PlanningProblem& problem) {
  FitnessScore score;
  score.per_officer.assign(plan.tours.size(), 0.0);
  for (std::size_t o = 0; o < plan.tours.size(); ++o) {
    for (const auto& stop : plan.tours[o]) {
      if (stop.arrival <= problem.horizon_end()) ++score.reachable;
      score.per_officer[o] += problem.benefit(stop.node) * problem.arrival_factor(stop.node, stop.arrival);
    }
    score.value += score.per_officer[o];
  }
  return score;
}

double fitness_of(const Chromosome& chromosome, const PlanningProblem& problem) {
  thread_local std::vector<double> time;
  thread_local std::vector<int> last;
  const int m = problem.n_officers();
  time.resize(static_cast<std::size_t>(m));
  last.assign(static_cast<std::size_t>(m), -1);
  for (int o = 0; o < m; ++o) time[static_cast<std::size_t>(o)] = problem.officers()[static_cast<std::size_t>(o)].ready_at;

  const auto& genes = chromosome.genes();
  double total = 0.0;
  int current = -1;
  for (std::size_t i = 0; i < genes.size(); ++i) {
    const Gene& g = genes[i];
    if (i == 0 || genes[i - 1].band != g.band) {
      current = -1;
      for (std::size_t j = i; j < genes.size() && genes[j].band == g.band; ++j)
        if (genes[j].kind == EntityKind::Officer) {
          current = genes[j].index;
          break;
        }
    }
    if (g.kind == EntityKind::Officer) {
      current = g.index;
      continue;
    }
    if (current < 0) throw ConfigError("chromosome band has nodes but no officer");
    const auto o = static_cast<std::size_t>(current);
    const double leg = last[o] < 0 ? problem.officer_travel(current, g.index) : problem.node_travel(last[o], g.index);
    const double arrival = time[o] + leg;
    total += problem.benefit(g.index) * problem.arrival_factor(g.index, arrival);
    time[o] = arrival + problem.nodes()[static_cast<std::size_t>(g.index)].stay_minutes;
    last[o] = g.index;
  }
  return total;
}

double net_objective(double fitness_total, int n_officers, double rho) {
  if (!(rho >= 0.0)) throw ConfigError("salary rho must be non-negative");
  return fitness_total - n_officers * rho;
}

Chromosome crossover(const Chromosome& mom, const Chromosome& dad, Rng& rng) {
  const int m = officer_count(mom);
  if (mom.guided() != dad.guided() || mom.genes().size() != dad.genes().size() || officer_count(dad) != m)
    throw std::invalid_argument("crossover parents cover different entities");
  const auto mom_bands = layouts(mom, m);
  const auto dad_bands = layouts(dad, m);
  const auto from_mom = node_origins(mom, mom_bands);
  const auto from_dad = node_origins(dad, dad_bands);
  if (from_mom.size() != from_dad.size()) throw std::invalid_argument("crossover parents cover different entities");
  for (std::size_t v = 0; v < from_mom.size(); ++v)
    if (!from_mom[v].present || !from_dad[v].present || from_mom[v].band != from_dad[v].band)
      throw std::invalid_argument("crossover parents cover different entities");

  std::vector<BandLayout> child;
  for (const auto& layout : mom_bands) {
    BandLayout b;
    b.band = layout.band;
    b.officer_order = layout.officer_order;
    b.nodes_of.resize(static_cast<std::size_t>(m));
    child.push_back(std::move(b));
  }
  auto band_slot = [&](KeyBand band) -> BandLayout& {
    for (auto& b : child)
      if (b.band == band) return b;
    throw std::invalid_argument("crossover parents cover different entities");
  };
  for (const auto& g : mom.genes())
    if (g.kind == EntityKind::Officer) band_slot(g.band).keys.push_back(g.key);

  std::vector<double> inherited(from_mom.size(), 0.0);
  std::bernoulli_distribution coin(0.5);
  for (std::size_t v = 0; v < from_mom.size(); ++v) {
    const NodeOrigin& origin = coin(rng) ? from_mom[v] : from_dad[v];
    BandLayout& b = band_slot(origin.band);
    b.nodes_of[static_cast<std::size_t>(origin.officer)].push_back(static_cast<int>(v));
    b.keys.push_back(origin.key);
    inherited[v] = origin.key;
  }
  for (auto& b : child)
    for (auto& nodes : b.nodes_of)
      std::sort(nodes.begin(), nodes.end(), [&](int a, int c) {
        const double ka = inherited[static_cast<std::size_t>(a)];
        const double kc = inherited[static_cast<std::size_t>(c)];
        return ka != kc ? ka > kc : a < c;
      });
  return from_layouts(child, mom.guided());
}

double levy_step(Rng& rng, double exponent, double alpha) {
  if (!(exponent > 0.0 && exponent <= 2.0)) throw std::invalid_argument("Levy exponent must lie in (0, 2]");
  if (alpha == 0.0) return 0.0;
  const double beta = exponent;
  const double sigma_u =
      std::pow(std::tgamma(1.0 + beta) * std::sin(std::numbers::pi * beta / 2.0) /
                   (std::tgamma((1.0 + beta) / 2.0) * beta * std::pow(2.0, (beta - 1.0) / 2.0)),
               1.0 / beta);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double u = sigma_u * normal(rng);
  double v = 0.0;
  while (v == 0.0) v = normal(rng);
  return alpha * u / std::pow(std::abs(v), 1.0 / beta);
}

Chromosome levy_flight(const Chromosome& chromosome, Rng& rng, double alpha, double exponent) {
  std::vector<Gene> genes = chromosome.genes();
  for (auto& g : genes)
    if (g.kind == EntityKind::Node) g.key = clamp_key(g.key + levy_step(rng, exponent, alpha), g.band);
  return Chromosome(std::move(genes), chromosome.guided());
}

OptimizeResult ga_optimize(const PlanningProblem& problem, const OptimizerParams& params, InitScheme init,
                           Rng& rng) {
  params.validate();
  const int n = params.population_size;
  const int elite = std::min(n, std::max(1, rounded(params.elitist_rate, n)));
  const int cross = std::min(n - elite, rounded(params.cross_rate, n));
  const int immigrants = std::min(n - elite - cross, rounded(params.mutate_rate, n));

  Population pop = initial(problem, n, init, rng);
  OptimizeResult result;
  std::uniform_int_distribution<int> pick(0, n - 1);
  for (int it = 0; it < params.max_iterations; ++it) {
    Population next = pop;
    for (int j = 0; j < cross; ++j) {
      const Chromosome& mom = pop.members[static_cast<std::size_t>(pick(rng))];
      const Chromosome& dad = pop.members[static_cast<std::size_t>(pick(rng))];
      Chromosome child = local_optimize(crossover(mom, dad, rng), problem, params.local_opt_probability, rng);
      const auto slot = static_cast<std::size_t>(elite + j);
      next.fit[slot] = fitness_of(child, problem);
      next.members[slot] = std::move(child);
    }
    for (int j = 0; j < immigrants; ++j) {
      const auto slot = static_cast<std::size_t>(n - 1 - j);
      next.members[slot] = fresh(problem, init, rng);
      next.fit[slot] = fitness_of(next.members[slot], problem);
    }
    pop = std::move(next);
    pop.rank();
    result.history.push_back(pop.fit.front());
  }
  result.best = pop.members.front();
  result.best_fitness = pop.fit.front();
  return result;
}

OptimizeResult cs_optimize(const PlanningProblem& problem, const OptimizerParams& params, InitScheme init,
                           Rng& rng) {
  params.validate();
  const int n = params.population_size;
  const int top = std::min(n, std::max(1, rounded(params.top_rate, n)));
  const int flights = rounded(params.pre_fly, n);
  const int abandon = std::min(n - 1, rounded(params.abandon_rate, n));

  Population pop = initial(problem, n, init, rng);
  OptimizeResult result;
  std::uniform_int_distribution<int> pick_top(0, top - 1);
  std::uniform_int_distribution<int> pick_any(0, n - 1);
  for (int it = 0; it < params.max_iterations; ++it) {
    for (int j = 0; j < flights; ++j) {
      const Chromosome& nest = pop.members[static_cast<std::size_t>(pick_top(rng))];
      Chromosome cuckoo = local_optimize(levy_flight(nest, rng, params.levy_alpha, params.levy_exponent), problem,
                                         params.local_opt_probability, rng);
      const double f = fitness_of(cuckoo, problem);
      const auto k = static_cast<std::size_t>(pick_any(rng));
      if (f > pop.fit[k]) {
        pop.members[k] = std::move(cuckoo);
        pop.fit[k] = f;
      }
    }
    pop.rank();
    for (int j = 0; j < abandon; ++j) {
      const auto slot = static_cast<std::size_t>(n - 1 - j);
      pop.members[slot] = fresh(problem, init, rng);
      pop.fit[slot] = fitness_of(pop.members[slot], problem);
    }
    pop.rank();
    result.history.push_back(pop.fit.front());
  }
  result.best = pop.members.front();
  result.best_fitness = pop.fit.front();
  return result;
}

namespace {

std::vector<int> officers_by_id(const PlanningProblem& problem) {
  std::vector<int> order(static_cast<std::size_t>(problem.n_officers()));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return problem.officers()[static_cast<std::size_t>(a)].id < problem.officers()[static_cast<std::size_t>(b)].id;
  });
  return order;
}

struct Cursor {
  double time = 0.0;
  int last = -1;
};

double leg_from(const PlanningProblem& problem, int officer, const Cursor& c, int node) {
  return c.last < 0 ? problem.officer_travel(officer, node) : problem.node_travel(c.last, node);
}

Assignment empty_assignment(const PlanningProblem& problem) {
  Assignment a;
  a.officer_of.assign(static_cast<std::size_t>(problem.n_nodes()), -1);
  a.tours.resize(static_cast<std::size_t>(problem.n_officers()));
  return a;
}

std::vector<Cursor> cursors(const PlanningProblem& problem) {
  std::vector<Cursor> out;
  for (const auto& o : problem.officers()) out.push_back({o.ready_at, -1});
  return out;
}

}  // namespace

Assignment imp_greedy(const PlanningProblem& problem) {
  Assignment a = empty_assignment(problem);
  if (problem.n_officers() == 0) return a;
  std::vector<int> nodes(static_cast<std::size_t>(problem.n_nodes()));
  std::iota(nodes.begin(), nodes.end(), 0);
  std::stable_sort(nodes.begin(), nodes.end(), [&](int x, int y) { return problem.benefit(x) > problem.benefit(y); });
  const auto officers = officers_by_id(problem);
  auto state = cursors(problem);

  for (int v : nodes) {
    int best = -1;
    double best_value = 0.0;
    double best_arrival = 0.0;
    for (int o : officers) {
      const auto& c = state[static_cast<std::size_t>(o)];
      const double arrival = c.time + leg_from(problem, o, c, v);
      const double value = problem.benefit(v) * problem.arrival_factor(v, arrival);
      if (best < 0 || value > best_value || (value == best_value && arrival < best_arrival)) {
        best = o;
        best_value = value;
        best_arrival = arrival;
      }
    }
    auto& c = state[static_cast<std::size_t>(best)];
    c.time = best_arrival + problem.nodes()[static_cast<std::size_t>(v)].stay_minutes;
    c.last = v;
    a.officer_of[static_cast<std::size_t>(v)] = best;
    a.tours[static_cast<std::size_t>(best)].push_back(v);
  }
  return a;
}

Assignment dis_greedy(const PlanningProblem& problem) {
  Assignment a = empty_assignment(problem);
  if (problem.n_officers() == 0) return a;
  const auto officers = officers_by_id(problem);
  auto state = cursors(problem);
  for (int remaining = problem.n_nodes(); remaining > 0; --remaining) {
    int best_o = -1;
    int best_v = -1;
    double best_leg = 0.0;
    for (int o : officers) {
      const auto& c = state[static_cast<std::size_t>(o)];
      for (int v = 0; v < problem.n_nodes(); ++v) {
        if (a.officer_of[static_cast<std::size_t>(v)] >= 0) continue;
        const double leg = leg_from(problem, o, c, v);
        if (best_o < 0 || leg < best_leg) {
          best_o = o;
          best_v = v;
          best_leg = leg;
        }
      }
    }
    auto& c = state[static_cast<std::size_t>(best_o)];
    c.time += best_leg + problem.nodes()[static_cast<std::size_t>(best_v)].stay_minutes;
    c.last = best_v;
    a.officer_of[static_cast<std::size_t>(best_v)] = best_o;
    a.tours[static_cast<std::size_t>(best_o)].push_back(best_v);
  }
  return a;
}

std::string_view to_string(PlannerKind kind) {
  switch (kind) {
    case PlannerKind::GlerkGa: return "glerk-ga";
    case PlannerKind::GlerkCs: return "glerk-cs";
    case PlannerKind::LerkGa: return "lerk-ga";
    case PlannerKind::LerkCs: return "lerk-cs";
    case PlannerKind::ImpGreedy: return "imp-greedy";
    case PlannerKind::DisGreedy: return "dis-greedy";
  }
  return "?";
}

PlannerKind parse_planner(std::string_view name) {
  for (auto kind : kAllPlanners)
    if (to_string(kind) == name) return kind;
  throw ConfigError("unknown planner '" + std::string(name) + "'");
}

Tours plan_routes(PlannerKind kind, const PlanningProblem& problem, const OptimizerParams& params, Rng& rng) {
  switch (kind) {
    case PlannerKind::ImpGreedy: return imp_greedy(problem).tours;
    case PlannerKind::DisGreedy: return dis_greedy(problem).tours;
    case PlannerKind::GlerkGa: return ga_optimize(problem, params, InitScheme::Guided, rng).best.tours(problem.n_officers());
    case PlannerKind::GlerkCs: return cs_optimize(problem, params, InitScheme::Guided, rng).best.tours(problem.n_officers());
    case PlannerKind::LerkGa: return ga_optimize(problem, params, InitScheme::Random, rng).best.tours(problem.n_officers());
    case PlannerKind::LerkCs: return cs_optimize(problem, params, InitScheme::Random, rng).best.tours(problem.n_officers());
  }
  throw ConfigError("unknown planner");
}

}  // namespace patrol
