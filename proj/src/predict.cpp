#include "patrol/predict.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "patrol/csv.hpp"
#include "patrol/rng.hpp"

namespace patrol {

int DecisionTree::predict(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  int i = 0;
  while (nodes_[i].feature >= 0) i = x[nodes_[i].feature] <= nodes_[i].threshold ? nodes_[i].left : nodes_[i].right;
  return nodes_[i].label;
}

int DecisionTree::depth() const {
  std::vector<int> depth(nodes_.size(), 0);
  int deepest = 0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    deepest = std::max(deepest, depth[i]);
    if (nodes_[i].feature >= 0) depth[nodes_[i].left] = depth[nodes_[i].right] = depth[i] + 1;
  }
  return deepest;
}

TreeEnsemble::TreeEnsemble(ForestParams params, int n_features, std::vector<DecisionTree> trees,
                           std::vector<std::uint64_t> seeds)
    : params_(params), n_features_(n_features), trees_(std::move(trees)), seeds_(std::move(seeds)) {}

double TreeEnsemble::vote(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  if (x.size() != n_features_)
    throw std::invalid_argument("feature vector has " + std::to_string(x.size()) + " values, model expects " +
                                std::to_string(n_features_));
  if (trees_.empty()) return 0.0;
  int crime = 0;
  for (const auto& t : trees_) crime += t.predict(x);
  return static_cast<double>(crime) / static_cast<double>(trees_.size());
}

int TreeEnsemble::predict(const Eigen::Ref<const Eigen::VectorXd>& x, double threshold) const {
  return vote(x) >= threshold ? 1 : 0;
}

namespace {

double gini(int positives, int total) {
  if (total == 0) return 0.0;
  const double p = static_cast<double>(positives) / total;
  return 2.0 * p * (1.0 - p);
}

class TreeBuilder {
 public:
  TreeBuilder(const Dataset& data, const ForestParams& params, int subset, Rng& rng)
      : data_(data), params_(params), subset_(subset), rng_(rng) {}

  DecisionTree build(std::vector<Eigen::Index> rows) {
    nodes_.clear();
    grow(rows, 0);
    return DecisionTree(std::move(nodes_));
  }

 private:
  int grow(std::vector<Eigen::Index>& rows, int depth) {
    const int id = static_cast<int>(nodes_.size());
    nodes_.emplace_back();
    const int n = static_cast<int>(rows.size());
    int positives = 0;
    for (auto r : rows) positives += data_.y[r];
    nodes_[id].label = 2 * positives > n ? 1 : 0;

    if (depth >= params_.max_depth || n < 2 * params_.min_leaf || positives == 0 || positives == n) return id;

    // Candidate features for this split, evaluated in ascending order.
    std::vector<int> features(data_.n_features());
    std::iota(features.begin(), features.end(), 0);
    if (subset_ < static_cast<int>(features.size())) {
      std::shuffle(features.begin(), features.end(), rng_);
      features.resize(subset_);
      std::sort(features.begin(), features.end());
    }

    const double parent = gini(positives, n);
    double best_score = parent - 1e-12;
    int best_feature = -1;
    double best_threshold = 0.0;
    std::vector<Eigen::Index> sorted = rows;
    for (int f : features) {
      std::stable_sort(sorted.begin(), sorted.end(),
                       [&](Eigen::Index a, Eigen::Index b) { return data_.x(a, f) < data_.x(b, f); });
      int left_pos = 0;
      for (int i = 0; i + 1 < n; ++i) {
        left_pos += data_.y[sorted[i]];
        const double lo = data_.x(sorted[i], f);
        const double hi = data_.x(sorted[i + 1], f);
        if (!(lo < hi)) continue;
        const int nl = i + 1;
        const int nr = n - nl;
        if (nl < params_.min_leaf || nr < params_.min_leaf) continue;
        const double score = (nl * gini(left_pos, nl) + nr * gini(positives - left_pos, nr)) / n;
        if (score < best_score) {
          best_score = score;
          best_feature = f;
          best_threshold = lo + (hi - lo) / 2.0;
        }
      }
    }
    if (best_feature < 0) return id;

    std::vector<Eigen::Index> left, right;
    for (auto r : rows) (data_.x(r, best_feature) <= best_threshold ? left : right).push_back(r);
    rows.clear();
    rows.shrink_to_fit();
    nodes_[id].feature = best_feature;
    nodes_[id].threshold = best_threshold;
    const int l = grow(left, depth + 1);
    nodes_[id].left = l;
    const int r = grow(right, depth + 1);
    nodes_[id].right = r;
    return id;
  }

  const Dataset& data_;
  const ForestParams& params_;
  int subset_;
  Rng& rng_;
  std::vector<DecisionTree::Node> nodes_;
};

}  // namespace

TreeEnsemble train(const Dataset& data, const ForestParams& params, std::uint64_t seed) {
  if (data.size() == 0) throw std::invalid_argument("cannot train on an empty dataset");
  if (params.n_trees < 1 || params.max_depth < 0 || params.min_leaf < 1 || params.feature_subset_size < 0)
    throw std::invalid_argument("forest parameters must be positive");
  const auto d = static_cast<int>(data.n_features());
  const int subset = params.feature_subset_size > 0
                         ? std::min(params.feature_subset_size, d)
                         : static_cast<int>(std::ceil(std::sqrt(static_cast<double>(d))));

  // Canonical row order: lexicographic on (features, label).
  std::vector<Eigen::Index> canonical(static_cast<std::size_t>(data.size()));
  std::iota(canonical.begin(), canonical.end(), 0);
  std::sort(canonical.begin(), canonical.end(), [&](Eigen::Index a, Eigen::Index b) {
    for (int f = 0; f < d; ++f) {
      if (data.x(a, f) != data.x(b, f)) return data.x(a, f) < data.x(b, f);
    }
    return data.y[a] < data.y[b];
  });

  std::vector<DecisionTree> trees;
  std::vector<std::uint64_t> seeds;
  for (int t = 0; t < params.n_trees; ++t) {
    const std::uint64_t tree_seed = derive_seed(seed, "tree", static_cast<std::uint64_t>(t));
    Rng rng(tree_seed);
    std::vector<Eigen::Index> rows;
    if (params.bootstrap) {
      std::uniform_int_distribution<std::size_t> pick(0, canonical.size() - 1);
      rows.reserve(canonical.size());
      for (std::size_t i = 0; i < canonical.size(); ++i) rows.push_back(canonical[pick(rng)]);
    } else {
      rows = canonical;
    }
    TreeBuilder builder(data, params, subset, rng);
    trees.push_back(builder.build(std::move(rows)));
    seeds.push_back(tree_seed);
  }
  return TreeEnsemble(params, d, std::move(trees), std::move(seeds));
}

ClassificationMetrics confusion_metrics(std::span<const int> truth, std::span<const int> predicted) {
  if (truth.size() != predicted.size()) throw std::invalid_argument("label vectors differ in length");
  ClassificationMetrics m;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] && predicted[i]) ++m.tp;
    else if (!truth[i] && predicted[i]) ++m.fp;
    else if (!truth[i] && !predicted[i]) ++m.tn;
    else ++m.fn;
  }
  const int n = m.tp + m.fp + m.tn + m.fn;
  m.accuracy = n ? static_cast<double>(m.tp + m.tn) / n : 0.0;
  m.precision = m.tp + m.fp ? static_cast<double>(m.tp) / (m.tp + m.fp) : 0.0;
  m.recall = m.tp + m.fn ? static_cast<double>(m.tp) / (m.tp + m.fn) : 0.0;
  m.f1 = m.precision + m.recall > 0 ? 2 * m.precision * m.recall / (m.precision + m.recall) : 0.0;
  return m;
}

ClassificationMetrics evaluate(const TreeEnsemble& model, const Dataset& held_out, double threshold) {
  if (held_out.size() == 0) throw std::invalid_argument("held-out set is empty");
  std::vector<int> predicted;
  predicted.reserve(static_cast<std::size_t>(held_out.size()));
  for (Eigen::Index i = 0; i < held_out.size(); ++i)
    predicted.push_back(model.predict(held_out.x.row(i).transpose(), threshold));
  return confusion_metrics(held_out.y, predicted);
}

// Serialization: {"format": "patrol-forest", "version": 1, ...}, one array per
// node field per tree.
std::string TreeEnsemble::to_json() const {
  nlohmann::json j;
  j["format"] = "patrol-forest";
  j["version"] = 1;
  j["n_features"] = n_features_;
  j["params"] = {{"n_trees", params_.n_trees},
                 {"max_depth", params_.max_depth},
                 {"min_leaf", params_.min_leaf},
                 {"feature_subset_size", params_.feature_subset_size},
                 {"bootstrap", params_.bootstrap}};
  j["seeds"] = seeds_;
  auto& trees = j["trees"] = nlohmann::json::array();
  for (const auto& t : trees_) {
    nlohmann::json tree;
    for (const auto& n : t.nodes()) {
      tree["feature"].push_back(n.feature);
      tree["threshold"].push_back(n.threshold);
      tree["left"].push_back(n.left);
      tree["right"].push_back(n.right);
      tree["label"].push_back(n.label);
    }
    trees.push_back(std::move(tree));
  }
  return j.dump();
}

TreeEnsemble TreeEnsemble::from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  if (j.value("format", "") != "patrol-forest") throw std::runtime_error("not a patrol-forest model");
  if (j.value("version", 0) != 1) throw std::runtime_error("unsupported model version");
  ForestParams p;
  const auto& jp = j.at("params");
  p.n_trees = jp.at("n_trees");
  p.max_depth = jp.at("max_depth");
  p.min_leaf = jp.at("min_leaf");
  p.feature_subset_size = jp.at("feature_subset_size");
  p.bootstrap = jp.at("bootstrap");
  const int n_features = j.at("n_features");
  std::vector<DecisionTree> trees;
  for (const auto& jt : j.at("trees")) {
    std::vector<DecisionTree::Node> nodes(jt.at("feature").size());
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      nodes[i] = {jt["feature"][i], jt["threshold"][i], jt["left"][i], jt["right"][i], jt["label"][i]};
      const auto& n = nodes[i];
      if (n.feature >= n_features) throw std::runtime_error("model feature index out of range");
      if (n.feature >= 0 && (n.left <= 0 || n.right <= 0 || n.left >= static_cast<int>(nodes.size()) ||
                             n.right >= static_cast<int>(nodes.size())))
        throw std::runtime_error("model child index out of range");
    }
    if (nodes.empty()) throw std::runtime_error("model contains an empty tree");
    trees.emplace_back(std::move(nodes));
  }
  return TreeEnsemble(p, n_features, std::move(trees), j.at("seeds").get<std::vector<std::uint64_t>>());
}

void TreeEnsemble::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path.string() + ": cannot write model");
  out << to_json() << '\n';
}

TreeEnsemble TreeEnsemble::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path.string() + ": cannot read model");
  std::stringstream buf;
  buf << in.rdbuf();
  return from_json(buf.str());
}

HotspotMap::HotspotMap(int first_day, int n_days, int n_nodes)
    : first_day_(first_day),
      n_days_(n_days),
      n_nodes_(n_nodes),
      states_(static_cast<std::size_t>(n_days) * kSlotsPerDay * n_nodes, NodeState::Coldspot) {}

std::size_t HotspotMap::index(NodeId node, TimeInterval interval) const {
  if (!covers(interval) || node < 0 || node >= n_nodes_ || interval.slot < 0 || interval.slot >= kSlotsPerDay)
    throw std::out_of_range("hotspot map lookup outside its period");
  return (static_cast<std::size_t>(interval.day - first_day_) * kSlotsPerDay + interval.slot) * n_nodes_ + node;
}

NodeState HotspotMap::at(NodeId node, TimeInterval interval) const { return states_[index(node, interval)]; }

void HotspotMap::set(NodeId node, TimeInterval interval, NodeState state) { states_[index(node, interval)] = state; }

std::size_t HotspotMap::hotspot_count() const {
  return static_cast<std::size_t>(std::count(states_.begin(), states_.end(), NodeState::Hotspot));
}

void HotspotMap::write_csv(std::ostream& out) const {
  csv::write_row(out, {"day", "slot", "node", "state"});
  for (int d = 0; d < n_days_; ++d)
    for (int s = 0; s < kSlotsPerDay; ++s)
      for (NodeId v = 0; v < n_nodes_; ++v)
        csv::write_row(out, {std::to_string(first_day_ + d), std::to_string(s), std::to_string(v),
                             std::string(to_string(at(v, {first_day_ + d, s})))});
}

HotspotMap HotspotMap::read_csv(std::istream& in) {
  csv::Reader reader(in);
  csv::Row row;
  if (!reader.next(row) || row != csv::Row{"day", "slot", "node", "state"})
    throw std::runtime_error("hotspot map: bad header");
  struct Entry {
    int day, slot, node;
    NodeState state;
  };
  std::vector<Entry> entries;
  int min_day = 0, max_day = -1, max_node = -1;
  while (reader.next(row)) {
    if (row.size() == 1 && row[0].empty()) continue;
    if (row.size() != 4) throw std::runtime_error("hotspot map: bad row at line " + std::to_string(reader.line()));
    Entry e{std::stoi(row[0]), std::stoi(row[1]), std::stoi(row[2]), NodeState::Coldspot};
    if (row[3] == "hotspot") e.state = NodeState::Hotspot;
    else if (row[3] != "coldspot") throw std::runtime_error("hotspot map: bad state `" + row[3] + "`");
    if (entries.empty() || e.day < min_day) min_day = e.day;
    max_day = std::max(max_day, e.day);
    max_node = std::max(max_node, e.node);
    entries.push_back(e);
  }
  HotspotMap map(min_day, max_day - min_day + 1, max_node + 1);
  for (const auto& e : entries) map.set(e.node, {e.day, e.slot}, e.state);
  return map;
}

bool ForestPredictor::is_hotspot(const FeatureRow& row) const { return model_->vote(row.values()) >= threshold_; }

HotspotMap predict_hotspots(const HotspotPredictor& predictor, std::span<const FeatureRow> rows, int n_nodes) {
  if (rows.empty()) return HotspotMap(0, 0, n_nodes);
  int first = rows.front().interval.day, last = first;
  for (const auto& r : rows) {
    first = std::min(first, r.interval.day);
    last = std::max(last, r.interval.day);
  }
  HotspotMap map(first, last - first + 1, n_nodes);
  for (const auto& r : rows)
    map.set(r.node, r.interval, predictor.is_hotspot(r) ? NodeState::Hotspot : NodeState::Coldspot);
  return map;
}

HotspotMap predict_hotspots(const TreeEnsemble& model, std::span<const FeatureRow> rows, int n_nodes,
                            double vote_threshold) {
  return predict_hotspots(ForestPredictor(model, vote_threshold), rows, n_nodes);
}

}  // namespace patrol
