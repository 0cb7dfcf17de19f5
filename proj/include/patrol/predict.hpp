#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "patrol/features.hpp"

namespace patrol {

struct ForestParams {
  int n_trees = 100;
  int max_depth = 12;
  int min_leaf = 2;
  int feature_subset_size = 0;  // 0 selects ceil(sqrt(n_features))
  bool bootstrap = true;
};

/// Binary CART tree with axis-aligned splits; `x[feature] <= threshold` goes left.
class DecisionTree {
 public:
  struct Node {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    int label = 0;
  };

  DecisionTree() = default;
  explicit DecisionTree(std::vector<Node> nodes) : nodes_(std::move(nodes)) {}

  int predict(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  const std::vector<Node>& nodes() const { return nodes_; }
  int depth() const;

 private:
  std::vector<Node> nodes_;
};

class TreeEnsemble {
 public:
  TreeEnsemble() = default;
  TreeEnsemble(ForestParams params, int n_features, std::vector<DecisionTree> trees,
               std::vector<std::uint64_t> seeds);

  /// Fraction of trees voting crime.
  double vote(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  int predict(const Eigen::Ref<const Eigen::VectorXd>& x, double threshold = 0.5) const;

  const ForestParams& params() const { return params_; }
  int n_features() const { return n_features_; }
  const std::vector<DecisionTree>& trees() const { return trees_; }
  const std::vector<std::uint64_t>& seeds() const { return seeds_; }

  void save(const std::filesystem::path& path) const;
  static TreeEnsemble load(const std::filesystem::path& path);
  std::string to_json() const;
  static TreeEnsemble from_json(const std::string& text);

 private:
  ForestParams params_;
  int n_features_ = 0;
  std::vector<DecisionTree> trees_;
  std::vector<std::uint64_t> seeds_;
};

/// Random-subspace forest: bootstrap rows per tree, random feature subset per
/// split, Gini impurity. Rows are put in canonical order first, so the result
/// depends only on the multiset of rows and the seed.
TreeEnsemble train(const Dataset& data, const ForestParams& params, std::uint64_t seed);

struct ClassificationMetrics {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  int tp = 0, fp = 0, tn = 0, fn = 0;
};

ClassificationMetrics confusion_metrics(std::span<const int> truth, std::span<const int> predicted);
ClassificationMetrics evaluate(const TreeEnsemble& model, const Dataset& held_out, double threshold = 0.5);

/// Predicted state per (node, day, slot) for a planning period.
class HotspotMap {
 public:
  HotspotMap() = default;
  HotspotMap(int first_day, int n_days, int n_nodes);

  NodeState at(NodeId node, TimeInterval interval) const;
  void set(NodeId node, TimeInterval interval, NodeState state);
  bool covers(TimeInterval interval) const {
    return interval.day >= first_day_ && interval.day < first_day_ + n_days_;
  }

  int first_day() const { return first_day_; }
  int n_days() const { return n_days_; }
  int n_nodes() const { return n_nodes_; }
  std::size_t hotspot_count() const;

  /// CSV: `day,slot,node,state` with day relative to the scenario start.
  void write_csv(std::ostream& out) const;
  static HotspotMap read_csv(std::istream& in);

 private:
  std::size_t index(NodeId node, TimeInterval interval) const;

  int first_day_ = 0;
  int n_days_ = 0;
  int n_nodes_ = 0;
  std::vector<NodeState> states_;
};

/// Labels one feature row hotspot or coldspot.
class HotspotPredictor {
 public:
  virtual ~HotspotPredictor() = default;
  virtual bool is_hotspot(const FeatureRow& row) const = 0;
};

class ForestPredictor : public HotspotPredictor {
 public:
  ForestPredictor(const TreeEnsemble& model, double vote_threshold) : model_(&model), threshold_(vote_threshold) {}
  bool is_hotspot(const FeatureRow& row) const override;

 private:
  const TreeEnsemble* model_;
  double threshold_;
};

/// Baseline: hotspot iff any crime in the same slot during the previous week.
class DensityPredictor : public HotspotPredictor {
 public:
  bool is_hotspot(const FeatureRow& row) const override { return row.h2 > 0.0; }
};

/// Labels every row; the map spans the rows' day range.
HotspotMap predict_hotspots(const HotspotPredictor& predictor, std::span<const FeatureRow> rows, int n_nodes);
HotspotMap predict_hotspots(const TreeEnsemble& model, std::span<const FeatureRow> rows, int n_nodes,
                            double vote_threshold);

}  // namespace patrol
