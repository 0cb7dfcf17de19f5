#include "patrol/features.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <ostream>
#include <random>
#include <set>
#include <stdexcept>

#include "patrol/csv.hpp"
#include "patrol/timeutil.hpp"

namespace patrol {

CrimeCounts::CrimeCounts(std::span<const CrimeRecord> crimes, Minutes start, int n_days, int n_nodes)
    : n_days_(n_days), n_nodes_(n_nodes), counts_(static_cast<std::size_t>(n_days) * kSlotsPerDay * n_nodes, 0) {
  const Minutes first_day = day_number(start);
  for (const auto& c : crimes) {
    const Minutes day = day_number(c.time) - first_day;
    if (day < 0 || day >= n_days || c.node < 0 || c.node >= n_nodes) continue;
    ++counts_[(static_cast<std::size_t>(day) * kSlotsPerDay + slot_of(c.time)) * n_nodes + c.node];
  }
}

int CrimeCounts::at(int day, int slot, NodeId node) const {
  if (day < 0 || day >= n_days_) return 0;
  return counts_[(static_cast<std::size_t>(day) * kSlotsPerDay + slot) * n_nodes_ + node];
}

double historical_density(const CrimeCounts& counts, NodeId node, int slot, int day, int window_days) {
  if (window_days < 1) throw std::invalid_argument("window must be at least one day");
  int total = 0;
  for (int d = day - window_days; d < day; ++d) total += counts.at(d, slot, node);
  return static_cast<double>(total) / window_days;
}

double recent_importance(const CrimeCounts& counts, NodeId node, int slot, int day) {
  return historical_density(counts, node, slot, day, 3);
}

namespace {

double entropy_bits(const Eigen::Ref<const Eigen::VectorXd>& p) {
  double h = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i)
    if (p[i] > 0.0) h -= p[i] * std::log2(p[i]);
  return h;
}

// Scalar mobility features of one node-slot. `users` and `venues` describe
// each check-in; `is_new` flags users with no earlier check-in at the node.
template <class IsNew>
MobilityFeatures mobility_core(const std::vector<std::string_view>& users,
                               const std::vector<std::string_view>& venues, int slot_total, IsNew&& is_new) {
  MobilityFeatures f;
  const int n = static_cast<int>(users.size());
  f.observation_frequency = n;
  if (n == 0) return f;

  // Per-user venue visit counts, users and venues in sorted order.
  std::map<std::string_view, std::map<std::string_view, int>> visits;
  for (int i = 0; i < n; ++i) ++visits[users[i]][venues[i]];
  f.user_count = static_cast<int>(visits.size());

  std::map<std::string_view, Eigen::Index> venue_index;
  for (const auto& v : venues) venue_index.emplace(v, 0);
  Eigen::Index next = 0;
  for (auto& [v, idx] : venue_index) idx = next++;

  Eigen::MatrixXd profile = Eigen::MatrixXd::Zero(f.user_count, next);
  Eigen::VectorXd share(f.user_count);
  int new_users = 0;
  Eigen::Index u = 0;
  for (const auto& [user, counts] : visits) {
    int total = 0;
    for (const auto& [venue, c] : counts) {
      profile(u, venue_index[venue]) = c;
      total += c;
    }
    share[u] = static_cast<double>(total) / n;
    new_users += is_new(user) ? 1 : 0;
    ++u;
  }

  f.visitor_entropy = entropy_bits(share);
  if (f.user_count == 1) {
    f.visitor_homogeneity = 1.0;
  } else {
    profile.rowwise().normalize();
    const Eigen::MatrixXd cosine = profile * profile.transpose();
    const double pairs = 0.5 * f.user_count * (f.user_count - 1);
    f.visitor_homogeneity = std::clamp((cosine.sum() - cosine.trace()) / 2.0 / pairs, 0.0, 1.0);
  }
  f.region_popularity = slot_total > 0 ? static_cast<double>(n) / slot_total : 0.0;
  f.visitor_ratio = static_cast<double>(new_users) / n;
  return f;
}

bool in_interval(Minutes t, Minutes start, TimeInterval interval) {
  return day_number(t) - day_number(start) == interval.day && slot_of(t) == interval.slot;
}

}  // namespace

PoiFeatures poi_features(std::span<const PoiRecord> pois, NodeId node, double cell_area_m2,
                         const std::vector<std::string>& categories) {
  PoiFeatures f;
  f.distribution = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(categories.size()));
  int total = 0;
  for (const auto& p : pois) {
    if (p.node != node) continue;
    ++total;
    auto it = std::lower_bound(categories.begin(), categories.end(), p.category);
    if (it != categories.end() && *it == p.category) f.distribution[it - categories.begin()] += 1.0;
  }
  if (total == 0) return f;
  f.distribution /= total;
  f.density = cell_area_m2 > 0 ? total / (cell_area_m2 / 1e6) : 0.0;
  f.diversity = entropy_bits(f.distribution);
  return f;
}

MobilityFeatures mobility_features(std::span<const CheckinRecord> checkins, Minutes scenario_start, NodeId node,
                                   TimeInterval interval) {
  const Minutes interval_start =
      (day_number(scenario_start) + interval.day) * kMinutesPerDay + interval.slot * kSlotMinutes;
  std::vector<std::string_view> users, venues;
  std::set<std::string_view> seen_before;
  int slot_total = 0;
  for (const auto& c : checkins) {
    if (c.node == node && c.time < interval_start) seen_before.insert(c.user_id);
    if (!in_interval(c.time, scenario_start, interval)) continue;
    ++slot_total;
    if (c.node != node) continue;
    users.push_back(c.user_id);
    venues.push_back(c.venue_id);
  }
  return mobility_core(users, venues, slot_total,
                       [&](std::string_view user) { return !seen_before.contains(user); });
}

Eigen::VectorXd FeatureRow::values() const {
  Eigen::VectorXd v(10 + poi_distribution.size());
  v << h1, h2, poi_density, location_diversity, mobility.visitor_entropy, mobility.visitor_homogeneity,
      mobility.region_popularity, mobility.visitor_ratio, mobility.user_count, mobility.observation_frequency,
      poi_distribution;
  return v;
}

std::vector<std::string> feature_names(const std::vector<std::string>& categories) {
  std::vector<std::string> names = {"h1_30day_density",      "h2_7day_density",      "poi_density",
                                    "location_diversity",    "visitor_entropy",      "visitor_homogeneity",
                                    "region_popularity",     "visitor_ratio",        "user_count",
                                    "observation_frequency"};
  for (const auto& c : categories) names.push_back("poi_share:" + c);
  return names;
}

std::vector<std::string> category_universe(std::span<const PoiRecord> pois) {
  std::set<std::string> set;
  for (const auto& p : pois) set.insert(p.category);
  return {set.begin(), set.end()};
}

FeatureExtractor::FeatureExtractor(const Scenario& scenario)
    : scenario_(&scenario),
      categories_(category_universe(scenario.pois)),
      counts_(scenario.crimes, scenario.start, scenario.n_days(), static_cast<int>(scenario.grid.size())) {
  const auto n_nodes = static_cast<NodeId>(scenario.grid.size());
  poi_.reserve(n_nodes);
  for (NodeId v = 0; v < n_nodes; ++v)
    poi_.push_back(poi_features(scenario.pois, v, scenario.grid.cell_area_m2, categories_));

  const std::size_t n_intervals = static_cast<std::size_t>(scenario.n_days()) * kSlotsPerDay;
  by_interval_.resize(n_intervals);
  interval_totals_.assign(n_intervals, 0);
  for (std::size_t i = 0; i < scenario.checkins.size(); ++i) {
    const auto& c = scenario.checkins[i];
    auto& first = first_seen_[c.user_id];
    auto [it, inserted] = first.emplace(c.node, c.time);
    if (!inserted) it->second = std::min(it->second, c.time);
    const int day = scenario.day_of(c.time);
    if (day < 0 || day >= scenario.n_days()) continue;
    const std::size_t k = static_cast<std::size_t>(day) * kSlotsPerDay + slot_of(c.time);
    by_interval_[k][c.node].push_back(i);
    ++interval_totals_[k];
  }
}

MobilityFeatures FeatureExtractor::mobility(NodeId node, TimeInterval interval) const {
  if (interval.day < 0 || interval.day >= scenario_->n_days()) return {};
  const std::size_t k = static_cast<std::size_t>(interval.day) * kSlotsPerDay + interval.slot;
  auto it = by_interval_[k].find(node);
  if (it == by_interval_[k].end()) return {};
  std::vector<std::string_view> users, venues;
  for (std::size_t i : it->second) {
    users.push_back(scenario_->checkins[i].user_id);
    venues.push_back(scenario_->checkins[i].venue_id);
  }
  const Minutes start =
      (day_number(scenario_->start) + interval.day) * kMinutesPerDay + interval.slot * kSlotMinutes;
  return mobility_core(users, venues, interval_totals_[k], [&](std::string_view user) {
    return first_seen_.at(std::string(user)).at(node) >= start;
  });
}

FeatureRow FeatureExtractor::row(NodeId node, TimeInterval interval) const {
  FeatureRow r;
  r.node = node;
  r.interval = interval;
  r.h1 = historical_density(counts_, node, interval.slot, interval.day, 30);
  r.h2 = historical_density(counts_, node, interval.slot, interval.day, 7);
  r.poi_distribution = poi_[node].distribution;
  r.poi_density = poi_[node].density;
  r.location_diversity = poi_[node].diversity;
  r.mobility = mobility(node, interval);
  r.label = counts_.at(interval.day, interval.slot, node) > 0 ? Label::Crime : Label::NoCrime;
  return r;
}

std::vector<FeatureRow> FeatureExtractor::rows(int day_begin, int day_end, std::span<const int> slots) const {
  std::vector<FeatureRow> out;
  const auto n_nodes = static_cast<NodeId>(scenario_->grid.size());
  for (int d = day_begin; d < day_end; ++d)
    for (int s : slots)
      for (NodeId v = 0; v < n_nodes; ++v) out.push_back(row(v, {d, s}));
  return out;
}

std::vector<FeatureRow> FeatureExtractor::rows(int day_begin, int day_end) const {
  std::vector<int> slots(kSlotsPerDay);
  std::iota(slots.begin(), slots.end(), 0);
  return rows(day_begin, day_end, slots);
}

Dataset to_dataset(std::span<const FeatureRow> rows) {
  Dataset data;
  if (rows.empty()) return data;
  const Eigen::Index d = rows.front().values().size();
  data.x.resize(static_cast<Eigen::Index>(rows.size()), d);
  data.y.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    Eigen::VectorXd v = rows[i].values();
    if (v.size() != d) throw std::invalid_argument("feature rows have inconsistent arity");
    data.x.row(static_cast<Eigen::Index>(i)) = v.transpose();
    data.y.push_back(rows[i].label == Label::Crime ? 1 : 0);
  }
  return data;
}

std::vector<FeatureRow> undersample(std::span<const FeatureRow> rows, std::uint64_t seed) {
  std::vector<std::size_t> crime, calm;
  for (std::size_t i = 0; i < rows.size(); ++i) (rows[i].label == Label::Crime ? crime : calm).push_back(i);
  if (crime.empty()) throw std::invalid_argument("cannot balance: no crime rows");
  if (calm.empty()) throw std::invalid_argument("cannot balance: no no-crime rows");

  auto& majority = crime.size() > calm.size() ? crime : calm;
  const std::size_t keep = std::min(crime.size(), calm.size());
  std::mt19937_64 rng(seed);
  std::shuffle(majority.begin(), majority.end(), rng);
  majority.resize(keep);

  std::vector<std::size_t> chosen;
  chosen.reserve(2 * keep);
  chosen.insert(chosen.end(), crime.begin(), crime.end());
  chosen.insert(chosen.end(), calm.begin(), calm.end());
  std::sort(chosen.begin(), chosen.end());
  std::vector<FeatureRow> out;
  out.reserve(chosen.size());
  for (std::size_t i : chosen) out.push_back(rows[i]);
  return out;
}

void write_features_csv(std::ostream& out, std::span<const FeatureRow> rows,
                        const std::vector<std::string>& categories) {
  csv::Row header = {"node", "day", "slot"};
  for (auto& name : feature_names(categories)) header.push_back(name);
  header.push_back("label");
  csv::write_row(out, header);
  for (const auto& r : rows) {
    csv::Row line = {std::to_string(r.node), std::to_string(r.interval.day), std::to_string(r.interval.slot)};
    const Eigen::VectorXd v = r.values();
    for (Eigen::Index i = 0; i < v.size(); ++i) line.push_back(format_double(v[i]));
    line.push_back(r.label == Label::Crime ? "crime" : "no-crime");
    csv::write_row(out, line);
  }
}

}  // namespace patrol
