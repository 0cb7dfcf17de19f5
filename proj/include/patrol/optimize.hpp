#pragma once

#include <array>
#include <string_view>
#include <vector>

#include "patrol/encoding.hpp"

namespace patrol {

struct OptimizerParams {
  int population_size = 100;
  int max_iterations = 300;
  // GA
  double elitist_rate = 0.2;
  double cross_rate = 0.3;
  double mutate_rate = 0.2;
  // CS
  double abandon_rate = 0.3;  // p_a
  double top_rate = 0.6;      // p_c
  double levy_alpha = 0.05;
  double levy_exponent = 1.0;
  double pre_fly = 0.3;

  double local_opt_probability = 0.5;

  /// Throws ConfigError on out-of-range values.
  void validate() const;
};

struct FitnessScore {
  double value = 0.0;
  std::vector<double> per_officer;
  int reachable = 0;  // stops reached within the horizon
};

FitnessScore fitness(const RoutePlan& plan, const PlanningProblem& problem);

/// Same total as fitness(decode(chromosome, problem), problem), without building the plan.
double fitness_of(const Chromosome& chromosome, const PlanningProblem& problem);

double net_objective(double fitness_total, int n_officers, double rho);

/// Uniform crossover: every node takes its officer and key from either parent
/// with probability 0.5; officer order and officer keys come from `mom`.
Chromosome crossover(const Chromosome& mom, const Chromosome& dad, Rng& rng);

/// alpha * s with s drawn by Mantegna's algorithm for a Levy-stable law of the
/// given exponent in (0, 2].
double levy_step(Rng& rng, double exponent = 1.0, double alpha = 0.05);

/// Moves every node key by a Levy step, clamped back into its band.
Chromosome levy_flight(const Chromosome& chromosome, Rng& rng, double alpha, double exponent);

enum class InitScheme { Guided, Random };

struct OptimizeResult {
  Chromosome best;
  double best_fitness = 0.0;
  std::vector<double> history;  // best of population after each iteration
};

OptimizeResult ga_optimize(const PlanningProblem& problem, const OptimizerParams& params, InitScheme init,
                           Rng& rng);
OptimizeResult cs_optimize(const PlanningProblem& problem, const OptimizerParams& params, InitScheme init,
                           Rng& rng);

struct Assignment {
  std::vector<int> officer_of;  // by node index, -1 when unassigned
  Tours tours;                  // by officer index
};

/// Nodes in descending benefit order each go to the officer with the highest
/// benefit times arrival factor from its projected position; ties go to the
/// earlier projected arrival, then the lower officer id.
Assignment imp_greedy(const PlanningProblem& problem);

/// Repeatedly pairs the closest (projected officer position, unassigned node);
/// ties go to the lower officer id, then the lower node index.
Assignment dis_greedy(const PlanningProblem& problem);

enum class PlannerKind { GlerkGa, GlerkCs, LerkGa, LerkCs, ImpGreedy, DisGreedy };

inline constexpr std::array<PlannerKind, 6> kAllPlanners = {PlannerKind::GlerkGa, PlannerKind::GlerkCs,
                                                            PlannerKind::LerkGa,  PlannerKind::LerkCs,
                                                            PlannerKind::ImpGreedy, PlannerKind::DisGreedy};

std::string_view to_string(PlannerKind kind);

/// Throws ConfigError for unknown names.
PlannerKind parse_planner(std::string_view name);

Tours plan_routes(PlannerKind kind, const PlanningProblem& problem, const OptimizerParams& params, Rng& rng);

}  // namespace patrol
