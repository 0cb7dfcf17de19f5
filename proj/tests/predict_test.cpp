#include <doctest.h>

#include <sstream>

#include "patrol/predict.hpp"

using namespace patrol;

namespace {

Dataset four_points() {
  Dataset d;
  d.x.resize(4, 2);
  d.x << 1.0, 3.0,  //
      2.0, 1.0,     //
      3.0, 4.0,     //
      4.0, 2.0;
  d.y = {1, 0, 1, 0};
  return d;
}

Dataset separable(int n) {
  Dataset d;
  d.x.resize(n, 1);
  for (int i = 0; i < n; ++i) {
    d.x(i, 0) = static_cast<double>(i) / n;
    d.y.push_back(i >= n / 2 ? 1 : 0);
  }
  return d;
}

std::vector<FeatureRow> rows_for(int n_nodes, int days) {
  std::vector<FeatureRow> rows;
  for (int d = 0; d < days; ++d)
    for (int s = 0; s < kSlotsPerDay; ++s)
      for (NodeId v = 0; v < n_nodes; ++v) {
        FeatureRow r;
        r.node = v;
        r.interval = {10 + d, s};
        r.h1 = v;
        r.poi_distribution = Eigen::VectorXd::Zero(1);
        rows.push_back(r);
      }
  return rows;
}

}  // namespace

TEST_CASE("depth-one tree is the best gini stump") {
  // Feature 0 at best leaves one mixed side (weighted gini 1/3); feature 1 at
  // 2.5 separates the labels completely.
  const ForestParams p{1, 1, 1, 2, false};
  const auto model = train(four_points(), p, 3);
  REQUIRE(model.trees().size() == 1);
  const auto& nodes = model.trees()[0].nodes();
  REQUIRE(nodes.size() == 3);
  CHECK(nodes[0].feature == 1);
  CHECK(nodes[0].threshold == 2.5);
  CHECK(nodes[static_cast<std::size_t>(nodes[0].left)].label == 0);
  CHECK(nodes[static_cast<std::size_t>(nodes[0].right)].label == 1);
  CHECK(model.trees()[0].depth() == 1);
}

TEST_CASE("forest training") {
  const auto data = separable(200);
  const auto model = train(data, {}, 8);
  CHECK(evaluate(model, data).accuracy == 1.0);

  const auto again = train(data, {}, 8);
  for (double probe : {0.1, 0.49, 0.5, 0.77}) {
    Eigen::VectorXd x(1);
    x << probe;
    CHECK(model.vote(x) == again.vote(x));
  }
  CHECK(again.to_json() == model.to_json());
  Eigen::VectorXd wrong(2);
  wrong << 0.0, 1.0;
  CHECK_THROWS(model.vote(wrong));
  CHECK_THROWS(train(Dataset{}, {}, 1));
}

TEST_CASE("row order does not change the forest") {
  auto data = separable(60);
  const auto a = train(data, {10, 4, 2, 1, true}, 5);
  Dataset shuffled = data;
  for (int i = 0; i < 60; ++i) {
    shuffled.x.row(i) = data.x.row(59 - i);
    shuffled.y[static_cast<std::size_t>(i)] = data.y[static_cast<std::size_t>(59 - i)];
  }
  CHECK(train(shuffled, {10, 4, 2, 1, true}, 5).to_json() == a.to_json());
}

TEST_CASE("model json round trip") {
  const auto model = train(separable(50), {5, 3, 1, 0, true}, 2);
  const auto copy = TreeEnsemble::from_json(model.to_json());
  CHECK(copy.to_json() == model.to_json());
  CHECK(copy.n_features() == 1);
  CHECK_THROWS(TreeEnsemble::from_json(R"({"format":"other"})"));
}

TEST_CASE("confusion metrics") {
  const std::vector<int> truth = {1, 1, 1, 1, 0, 0, 0, 0, 0, 0};
  const std::vector<int> guess = {1, 1, 1, 0, 1, 0, 0, 0, 0, 0};
  const auto m = confusion_metrics(truth, guess);
  CHECK(m.tp == 3);
  CHECK(m.fn == 1);
  CHECK(m.fp == 1);
  CHECK(m.tn == 5);
  CHECK(m.accuracy == doctest::Approx(0.8));
  CHECK(m.precision == doctest::Approx(0.75));
  CHECK(m.recall == doctest::Approx(0.75));
  CHECK(m.f1 == doctest::Approx(0.75));
  CHECK(confusion_metrics(truth, truth).accuracy == 1.0);
  const std::vector<int> ones(4, 1), zeros(4, 0);
  CHECK(confusion_metrics(ones, zeros).recall == 0.0);
}

TEST_CASE("hotspot map from votes") {
  auto rows = rows_for(3, 2);
  for (auto& r : rows) r.label = r.node == 2 ? Label::Crime : Label::NoCrime;
  const auto model = train(to_dataset(rows), {3, 2, 1, 0, true}, 1);
  const auto all_hot = predict_hotspots(model, rows, 3, 0.0);
  CHECK(all_hot.hotspot_count() == rows.size());
  CHECK(all_hot.first_day() == 10);
  CHECK(all_hot.n_days() == 2);
  const auto all_cold = predict_hotspots(model, rows, 3, 1.0 + 1e-9);
  CHECK(all_cold.hotspot_count() == 0);
  CHECK(all_cold.at(2, {11, 11}) == NodeState::Coldspot);
  CHECK_THROWS(all_cold.at(0, {12, 0}));

  auto baseline_rows = rows;
  for (auto& r : baseline_rows) r.h2 = r.node == 1 ? 0.5 : 0.0;
  const auto density = predict_hotspots(DensityPredictor{}, baseline_rows, 3);
  CHECK(density.at(1, {10, 3}) == NodeState::Hotspot);
  CHECK(density.at(0, {10, 3}) == NodeState::Coldspot);

  std::stringstream csv;
  density.write_csv(csv);
  const auto back = HotspotMap::read_csv(csv);
  CHECK(back.hotspot_count() == density.hotspot_count());
  CHECK(back.at(1, {11, 0}) == NodeState::Hotspot);
  CHECK(back.first_day() == 10);
}
