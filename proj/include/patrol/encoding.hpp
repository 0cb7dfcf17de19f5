#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "patrol/problem.hpp"
#include "patrol/rng.hpp"

namespace patrol {

enum class EntityKind : std::uint8_t { Officer, Node };

/// Key ranges: Full = (0,1] for unguided plans; guided plans key hotspot and
/// emergency nodes in Upper = (0.5,1] and coldspots in Lower = (0,0.5].
enum class KeyBand : std::uint8_t { Full, Upper, Lower };

struct KeyRange {
  double lo;  // exclusive
  double hi;  // inclusive
};

constexpr KeyRange range_of(KeyBand band) {
  switch (band) {
    case KeyBand::Upper: return {0.5, 1.0};
    case KeyBand::Lower: return {0.0, 0.5};
    case KeyBand::Full: break;
  }
  return {0.0, 1.0};
}

/// Band of a node in a guided plan; emergencies share the hotspot band.
constexpr KeyBand guided_band(NodeState state) {
  return state == NodeState::Coldspot ? KeyBand::Lower : KeyBand::Upper;
}

/// Clamps `key` into the band's half-open range.
double clamp_key(double key, KeyBand band);

struct Gene {
  EntityKind kind = EntityKind::Node;
  int index = 0;  // officer or node index in the planning problem
  double key = 0.0;
  KeyBand band = KeyBand::Full;
};

/// Keyed officer/node link-list for one multi-officer plan.
///
/// Genes are kept sorted by band (Full, Upper, Lower), then key descending,
/// officers before nodes, then index. Within a band an officer gene opens that
/// officer's sub-tour and the node genes after it join that sub-tour; nodes
/// ahead of the band's first officer join the first officer. Unguided plans
/// carry one Full gene per officer; guided plans carry one Upper and one Lower
/// gene per officer, so every sub-tour lists its hot nodes first.
class Chromosome {
 public:
  Chromosome() = default;
  Chromosome(std::vector<Gene> genes, bool guided);

  const std::vector<Gene>& genes() const { return genes_; }
  bool guided() const { return guided_; }

  /// Sub-tours by officer index.
  Tours tours(int n_officers) const;

  friend bool operator==(const Chromosome&, const Chromosome&);

 private:
  std::vector<Gene> genes_;
  bool guided_ = false;
};

/// Every officer and node gets an independent key in (0,1].
Chromosome encode_lerk(const PlanningProblem& problem, Rng& rng);

/// Guided draw: hot/emergency nodes and cold nodes are allotted to officers
/// separately, each officer heading its allotment within the band.
Chromosome encode_glerk(const PlanningProblem& problem, Rng& rng);

RoutePlan decode(const Chromosome& chromosome, const PlanningProblem& problem);

/// With probability `probability`, moves the highest-benefit node of every
/// sub-tour to the front of its band segment.
Chromosome local_optimize(const Chromosome& chromosome, const PlanningProblem& problem, double probability,
                          Rng& rng);

/// Officer order and per-officer node lists of one key band, plus the band's
/// keys in descending order.
struct BandLayout {
  KeyBand band = KeyBand::Full;
  std::vector<int> officer_order;
  std::vector<std::vector<int>> nodes_of;  // by officer index
  std::vector<double> keys;
};

std::vector<BandLayout> layouts(const Chromosome& chromosome, int n_officers);

/// Rebuilds genes from layouts, handing out each band's keys in descending
/// order along [officer, its nodes..., next officer, ...].
Chromosome from_layouts(const std::vector<BandLayout>& bands, bool guided);

/// Human-readable invariant violations; empty when the chromosome is valid for `problem`.
std::vector<std::string> check_invariants(const Chromosome& chromosome, const PlanningProblem& problem);

}  // namespace patrol
