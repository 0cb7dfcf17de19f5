#include "patrol/encoding.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <tuple>

namespace patrol {

namespace {

bool gene_order(const Gene& a, const Gene& b) {
  if (a.band != b.band) return a.band < b.band;
  if (a.key != b.key) return a.key > b.key;
  if (a.kind != b.kind) return a.kind < b.kind;  // officers first
  return a.index < b.index;
}

void require_officers(const PlanningProblem& problem) {
  if (problem.n_officers() < 1) throw ConfigError("a plan needs at least one officer");
}

// Deals `nodes` to officers: one each in `officer_order` while nodes last, the
// rest uniformly at random.
BandLayout allot(KeyBand band, std::vector<int> nodes, int n_officers, Rng& rng) {
  BandLayout layout;
  layout.band = band;
  layout.officer_order.resize(static_cast<std::size_t>(n_officers));
  std::iota(layout.officer_order.begin(), layout.officer_order.end(), 0);
  std::shuffle(layout.officer_order.begin(), layout.officer_order.end(), rng);
  std::shuffle(nodes.begin(), nodes.end(), rng);
  layout.nodes_of.resize(static_cast<std::size_t>(n_officers));
  std::uniform_int_distribution<int> any_officer(0, n_officers - 1);
  for (int node : nodes) layout.nodes_of[static_cast<std::size_t>(any_officer(rng))].push_back(node);
  const KeyRange range = range_of(band);
  for (std::size_t i = 0; i < nodes.size() + static_cast<std::size_t>(n_officers); ++i)
    layout.keys.push_back(uniform_open_closed(rng, range.lo, range.hi));
  std::sort(layout.keys.begin(), layout.keys.end(), std::greater<>());
  return layout;
}

}  // namespace

double clamp_key(double key, KeyBand band) {
  const KeyRange range = range_of(band);
  const double lowest = std::nextafter(range.lo, range.hi);
  if (std::isnan(key)) return range.hi;
  return std::clamp(key, lowest, range.hi);
}

Chromosome::Chromosome(std::vector<Gene> genes, bool guided) : genes_(std::move(genes)), guided_(guided) {
  std::sort(genes_.begin(), genes_.end(), gene_order);
}

bool operator==(const Chromosome& a, const Chromosome& b) {
  if (a.guided_ != b.guided_ || a.genes_.size() != b.genes_.size()) return false;
  for (std::size_t i = 0; i < a.genes_.size(); ++i) {
    const auto& x = a.genes_[i];
    const auto& y = b.genes_[i];
    if (std::tie(x.kind, x.index, x.key, x.band) != std::tie(y.kind, y.index, y.key, y.band)) return false;
  }
  return true;
}

Tours Chromosome::tours(int n_officers) const {
  Tours out(static_cast<std::size_t>(n_officers));
  std::size_t i = 0;
  while (i < genes_.size()) {
    std::size_t end = i;
    int current = -1;
    while (end < genes_.size() && genes_[end].band == genes_[i].band) {
      if (current < 0 && genes_[end].kind == EntityKind::Officer) current = genes_[end].index;
      ++end;
    }
    for (; i < end; ++i) {
      const Gene& g = genes_[i];
      if (g.kind == EntityKind::Officer) {
        current = g.index;
      } else {
        if (current < 0) throw ConfigError("chromosome band has nodes but no officer");
        out[static_cast<std::size_t>(current)].push_back(g.index);
      }
    }
  }
  return out;
}

std::vector<BandLayout> layouts(const Chromosome& chromosome, int n_officers) {
  std::vector<BandLayout> out;
  const auto& genes = chromosome.genes();
  std::size_t i = 0;
  while (i < genes.size()) {
    BandLayout layout;
    layout.band = genes[i].band;
    layout.nodes_of.resize(static_cast<std::size_t>(n_officers));
    std::size_t end = i;
    int current = -1;
    while (end < genes.size() && genes[end].band == layout.band) {
      if (current < 0 && genes[end].kind == EntityKind::Officer) current = genes[end].index;
      ++end;
    }
    for (; i < end; ++i) {
      const Gene& g = genes[i];
      layout.keys.push_back(g.key);
      if (g.kind == EntityKind::Officer) {
        current = g.index;
        layout.officer_order.push_back(g.index);
      } else {
        if (current < 0) throw ConfigError("chromosome band has nodes but no officer");
        layout.nodes_of[static_cast<std::size_t>(current)].push_back(g.index);
      }
    }
    out.push_back(std::move(layout));
  }
  return out;
}

Chromosome from_layouts(const std::vector<BandLayout>& bands, bool guided) {
  std::vector<Gene> genes;
  for (const auto& layout : bands) {
    std::vector<double> keys = layout.keys;
    std::sort(keys.begin(), keys.end(), std::greater<>());
    // Strictly decreasing keys keep the sequence intact under the gene order.
    const KeyRange range = range_of(layout.band);
    for (std::size_t k = 1; k < keys.size(); ++k)
      if (keys[k] >= keys[k - 1]) keys[k] = std::nextafter(keys[k - 1], range.lo);
    // Ties piled on the lower bound (clamped keys) would step out of the band; lift them back.
    if (!keys.empty() && keys.back() <= range.lo) {
      keys.back() = std::nextafter(range.lo, range.hi);
      for (std::size_t k = keys.size() - 1; k-- > 0;)
        if (keys[k] <= keys[k + 1]) keys[k] = std::nextafter(keys[k + 1], range.hi);
    }
    std::size_t k = 0;
    for (int officer : layout.officer_order) {
      genes.push_back({EntityKind::Officer, officer, keys.at(k++), layout.band});
      for (int node : layout.nodes_of[static_cast<std::size_t>(officer)])
        genes.push_back({EntityKind::Node, node, keys.at(k++), layout.band});
    }
  }
  return Chromosome(std::move(genes), guided);
}

Chromosome encode_lerk(const PlanningProblem& problem, Rng& rng) {
  require_officers(problem);
  std::vector<Gene> genes;
  for (int o = 0; o < problem.n_officers(); ++o)
    genes.push_back({EntityKind::Officer, o, uniform_open_closed(rng, 0.0, 1.0), KeyBand::Full});
  for (int v = 0; v < problem.n_nodes(); ++v)
    genes.push_back({EntityKind::Node, v, uniform_open_closed(rng, 0.0, 1.0), KeyBand::Full});
  return Chromosome(std::move(genes), false);
}

Chromosome encode_glerk(const PlanningProblem& problem, Rng& rng) {
  require_officers(problem);
  std::vector<int> hot, cold;
  for (int v = 0; v < problem.n_nodes(); ++v)
    (guided_band(problem.nodes()[static_cast<std::size_t>(v)].state) == KeyBand::Upper ? hot : cold).push_back(v);
  std::vector<BandLayout> bands;
  bands.push_back(allot(KeyBand::Upper, std::move(hot), problem.n_officers(), rng));
  bands.push_back(allot(KeyBand::Lower, std::move(cold), problem.n_officers(), rng));
  return from_layouts(bands, true);
}

RoutePlan decode(const Chromosome& chromosome, const PlanningProblem& problem) {
  require_officers(problem);
  return schedule(problem, chromosome.tours(problem.n_officers()));
}

Chromosome local_optimize(const Chromosome& chromosome, const PlanningProblem& problem, double probability,
                          Rng& rng) {
  if (!(std::uniform_real_distribution<double>(0.0, 1.0)(rng) < probability)) return chromosome;
  const int m = problem.n_officers();
  std::vector<KeyBand> band_of(static_cast<std::size_t>(problem.n_nodes()), KeyBand::Full);
  for (const auto& g : chromosome.genes())
    if (g.kind == EntityKind::Node) band_of[static_cast<std::size_t>(g.index)] = g.band;

  auto bands = layouts(chromosome, m);
  const Tours tours = chromosome.tours(m);
  bool moved = false;
  for (int o = 0; o < m; ++o) {
    const auto& tour = tours[static_cast<std::size_t>(o)];
    if (tour.empty()) continue;
    int best = tour.front();
    for (int node : tour)
      if (problem.benefit(node) > problem.benefit(best)) best = node;
    for (auto& layout : bands) {
      if (layout.band != band_of[static_cast<std::size_t>(best)]) continue;
      auto& segment = layout.nodes_of[static_cast<std::size_t>(o)];
      auto it = std::find(segment.begin(), segment.end(), best);
      if (it != segment.begin() && it != segment.end()) {
        std::rotate(segment.begin(), it, it + 1);
        moved = true;
      }
    }
  }
  return moved ? from_layouts(bands, chromosome.guided()) : chromosome;
}

std::vector<std::string> check_invariants(const Chromosome& chromosome, const PlanningProblem& problem) {
  std::vector<std::string> errors;
  const int n = problem.n_nodes();
  const int m = problem.n_officers();
  std::vector<int> node_seen(static_cast<std::size_t>(n), 0);
  std::vector<int> officer_seen(static_cast<std::size_t>(m) * 3, 0);
  for (const auto& g : chromosome.genes()) {
    const KeyRange range = range_of(g.band);
    if (!(g.key > range.lo && g.key <= range.hi))
      errors.push_back("key " + std::to_string(g.key) + " outside its band");
    if (g.kind == EntityKind::Node) {
      if (g.index < 0 || g.index >= n) {
        errors.push_back("unknown node index " + std::to_string(g.index));
        continue;
      }
      ++node_seen[static_cast<std::size_t>(g.index)];
      const auto state = problem.nodes()[static_cast<std::size_t>(g.index)].state;
      const KeyBand expected = chromosome.guided() ? guided_band(state) : KeyBand::Full;
      if (g.band != expected) errors.push_back("node " + std::to_string(g.index) + " keyed in the wrong band");
    } else {
      if (g.index < 0 || g.index >= m) {
        errors.push_back("unknown officer index " + std::to_string(g.index));
        continue;
      }
      ++officer_seen[static_cast<std::size_t>(g.index) * 3 + static_cast<std::size_t>(g.band)];
    }
  }
  for (int v = 0; v < n; ++v)
    if (node_seen[static_cast<std::size_t>(v)] != 1)
      errors.push_back("node " + std::to_string(v) + " appears " + std::to_string(node_seen[v]) + " times");
  for (int o = 0; o < m; ++o) {
    const auto* seen = &officer_seen[static_cast<std::size_t>(o) * 3];
    const bool ok = chromosome.guided() ? (seen[0] == 0 && seen[1] == 1 && seen[2] == 1)
                                        : (seen[0] == 1 && seen[1] == 0 && seen[2] == 0);
    if (!ok) errors.push_back("officer " + std::to_string(o) + " has the wrong number of genes");
  }
  if (!errors.empty() || m == 0) return errors;

  const Tours tours = chromosome.tours(m);
  std::vector<int> assigned(static_cast<std::size_t>(n), 0);
  for (int o = 0; o < m; ++o) {
    const auto& tour = tours[static_cast<std::size_t>(o)];
    bool has_hot = false;
    for (int v : tour) {
      ++assigned[static_cast<std::size_t>(v)];
      has_hot |= problem.nodes()[static_cast<std::size_t>(v)].state != NodeState::Coldspot;
    }
    if (chromosome.guided() && has_hot &&
        problem.nodes()[static_cast<std::size_t>(tour.front())].state == NodeState::Coldspot)
      errors.push_back("officer " + std::to_string(o) + " holds a hotspot but starts cold");
  }
  for (int v = 0; v < n; ++v)
    if (assigned[static_cast<std::size_t>(v)] != 1)
      errors.push_back("node " + std::to_string(v) + " is not assigned to exactly one officer");
  return errors;
}

}  // namespace patrol
