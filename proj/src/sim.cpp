#include "patrol/sim.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "patrol/csv.hpp"
#include "patrol/timeutil.hpp"

namespace patrol {

void SimConfig::validate() const {
  if (n_officers < 1) throw ConfigError("at least one officer is required");
  if (!(speed_mps > 0.0)) throw ConfigError("speed must be positive");
  if (!(stay_minutes >= 0.0) || !(emergency_stay_minutes >= 0.0)) throw ConfigError("stay time must be non-negative");
  if (shift_start_minute < 0 || shift_end_minute > 24 * 60 || shift_start_minute >= shift_end_minute)
    throw ConfigError("shift must be a non-empty span within one day");
  optimizer.validate();
}

std::string_view to_string(EventKind kind) {
  switch (kind) {
    case EventKind::Dispatch: return "dispatch";
    case EventKind::Arrival: return "arrival";
    case EventKind::VisitStart: return "visit_start";
    case EventKind::VisitEnd: return "visit_end";
    case EventKind::CallAttended: return "call_attended";
    case EventKind::CallUnattended: return "call_unattended";
    case EventKind::ShiftEnd: return "shift_end";
  }
  return "?";
}

void write_events_csv(std::ostream& out, const EventLog& log) {
  csv::write_row(out, {"time", "officer_id", "event", "node_id", "priority", "delay_min"});
  for (const auto& e : log.events) {
    const bool call = e.kind == EventKind::CallAttended || e.kind == EventKind::CallUnattended;
    csv::write_row(out, {format_timestamp(e.time), e.officer >= 0 ? std::to_string(e.officer) : "",
                         std::string(to_string(e.kind)), e.node >= 0 ? std::to_string(e.node) : "",
                         call ? std::to_string(e.priority) : "",
                         e.kind == EventKind::CallAttended ? format_double(e.delay) : ""});
  }
}

std::vector<NodeId> WorldState::unassigned() const {
  std::vector<NodeId> out;
  for (std::size_t v = 0; v < locked.size(); ++v)
    if (!locked[v] && (!covered[v] || !pending[v].empty())) out.push_back(static_cast<NodeId>(v));
  return out;
}

NodeState WorldState::state_of(NodeId node) const {
  return pending[static_cast<std::size_t>(node)].empty() ? predicted[static_cast<std::size_t>(node)]
                                                         : NodeState::Emergency;
}

Simulator::Simulator(const Scenario& scenario, const HotspotMap& hotspots, SimConfig config, std::uint64_t seed)
    : scenario_(scenario), hotspots_(hotspots), config_(std::move(config)), rng_(derive_seed(seed, "sim")) {
  config_.validate();
  if (scenario_.grid.size() == 0) throw ConfigError("scenario grid is empty");
  table_ = std::make_shared<TravelTable>(scenario_.grid.cells, config_.speed_mps);
  counts_ = CrimeCounts(scenario_.crimes, scenario_.start, scenario_.n_days(), static_cast<int>(scenario_.grid.size()));
  calls_ = scenario_.emergency_calls();
  std::stable_sort(calls_.begin(), calls_.end(),
                   [](const EmergencyCall& a, const EmergencyCall& b) { return a.call_time < b.call_time; });
  const auto n = scenario_.grid.size();
  state_.predicted.assign(n, NodeState::Coldspot);
  state_.importance.assign(n, 0.0);
  state_.pending.assign(n, {});
  state_.locked.assign(n, false);
  state_.covered.assign(n, false);
}

Minutes Simulator::day_start() const { return (day_number(scenario_.start) + state_.day) * kMinutesPerDay; }

double Simulator::stay_at(NodeId node) const {
  return state_.pending[static_cast<std::size_t>(node)].empty() ? config_.stay_minutes : config_.emergency_stay_minutes;
}

void Simulator::begin_day(int day) {
  state_.day = day;
  state_.clock = day_start() + config_.shift_start_minute;
  state_.slot = -1;
  state_.officers.clear();
  for (int i = 0; i < config_.n_officers; ++i) state_.officers.push_back({i, OfficerStatus::Idle, 0, kNoNode, 0.0, 0});
  std::fill(state_.locked.begin(), state_.locked.end(), false);
  for (auto& p : state_.pending) p.clear();
  // Calls before the day's start belong to earlier days.
  while (next_call_ < calls_.size() && calls_[next_call_].call_time < day_start()) ++next_call_;
  inject_calls();
  refresh_slot();
  plan();
}

bool Simulator::shift_over() const { return state_.clock >= day_start() + config_.shift_end_minute; }

void Simulator::step() {
  ++state_.clock;
  const double stride = config_.speed_mps * 60.0;
  for (auto& officer : state_.officers) {
    if (officer.status != OfficerStatus::Travelling) continue;
    officer.remaining_m -= stride;
    if (officer.remaining_m <= 1e-9) arrive(officer);
  }
  for (auto& officer : state_.officers) {
    if (officer.status != OfficerStatus::Visiting || officer.visit_end > state_.clock) continue;
    emit({state_.clock, officer.id, EventKind::VisitEnd, officer.target});
    state_.locked[static_cast<std::size_t>(officer.target)] = false;
    officer.at = officer.target;
    officer.target = kNoNode;
    officer.status = OfficerStatus::Idle;
  }
  inject_calls();
  refresh_slot();
  plan();
}

void Simulator::arrive(OfficerState& officer) {
  const NodeId node = officer.target;
  officer.remaining_m = 0.0;
  officer.at = node;
  officer.status = OfficerStatus::Visiting;
  officer.visit_end = state_.clock + static_cast<Minutes>(std::ceil(stay_at(node)));
  emit({state_.clock, officer.id, EventKind::Arrival, node});
  emit({state_.clock, officer.id, EventKind::VisitStart, node});
  attend(node, officer.id);
  state_.covered[static_cast<std::size_t>(node)] = true;
}

void Simulator::attend(NodeId node, OfficerId officer) {
  auto& calls = state_.pending[static_cast<std::size_t>(node)];
  for (const auto& c : calls) {
    const double delay = static_cast<double>(state_.clock - c.call_time);
    emit({state_.clock, officer, EventKind::CallAttended, node, c.priority, delay, c.id});
  }
  calls.clear();
}

void Simulator::inject_calls() {
  while (next_call_ < calls_.size() && calls_[next_call_].call_time <= state_.clock) {
    const auto& call = calls_[next_call_++];
    if (call.node < 0 || call.node >= static_cast<NodeId>(state_.pending.size())) {
      emit({state_.clock, -1, EventKind::CallUnattended, call.node, call.priority, 0.0, call.id});
      continue;
    }
    state_.pending[static_cast<std::size_t>(call.node)].push_back(call);
    for (const auto& officer : state_.officers)
      if (officer.status == OfficerStatus::Visiting && officer.target == call.node) {
        attend(call.node, officer.id);
        break;
      }
  }
}

void Simulator::refresh_slot() {
  const int slot = slot_of(state_.clock);
  if (slot == state_.slot) return;
  state_.slot = slot;
  std::fill(state_.covered.begin(), state_.covered.end(), false);
  const TimeInterval interval{state_.day, slot};
  for (NodeId v = 0; v < static_cast<NodeId>(state_.predicted.size()); ++v) {
    state_.predicted[static_cast<std::size_t>(v)] = hotspots_.covers(interval) ? hotspots_.at(v, interval)
                                                                               : NodeState::Coldspot;
    state_.importance[static_cast<std::size_t>(v)] = recent_importance(counts_, v, slot, state_.day);
  }
}

void Simulator::plan() {
  std::vector<std::size_t> idle;
  for (std::size_t i = 0; i < state_.officers.size(); ++i)
    if (state_.officers[i].status == OfficerStatus::Idle) idle.push_back(i);
  if (idle.empty()) return;
  const auto candidates = state_.unassigned();
  if (candidates.empty()) return;

  const auto& cells = scenario_.grid.cells;
  std::vector<PatrolNode> nodes;
  nodes.reserve(candidates.size());
  for (NodeId v : candidates) {
    PatrolNode node = cells[static_cast<std::size_t>(v)];
    node.state = state_.state_of(v);
    node.importance = state_.importance[static_cast<std::size_t>(v)];
    node.stay_minutes = stay_at(v);
    node.priority = 1;
    node.call_time.reset();
    const auto& calls = state_.pending[static_cast<std::size_t>(v)];
    for (const auto& c : calls) node.priority = std::max(node.priority, c.priority);
    for (const auto& c : calls)
      if (c.priority == node.priority && (!node.call_time || c.call_time < *node.call_time))
        node.call_time = static_cast<double>(c.call_time);
    nodes.push_back(std::move(node));
  }
  std::vector<PlanOfficer> officers;
  for (auto i : idle) {
    const auto& o = state_.officers[i];
    officers.push_back({o.id, cells[static_cast<std::size_t>(o.at)].centroid, static_cast<double>(state_.clock), o.at});
  }
  const double max_stay = std::max(config_.stay_minutes, config_.emergency_stay_minutes);
  const double horizon = static_cast<double>(day_start() + config_.shift_end_minute) - max_stay;
  const PlanningProblem problem(std::move(nodes), std::move(officers), static_cast<double>(state_.clock), horizon,
                                config_.speed_mps, table_);
  const Tours tours = plan_routes(config_.planner, problem, config_.optimizer, rng_);
  for (std::size_t k = 0; k < idle.size(); ++k) {
    if (tours[k].empty()) continue;
    dispatch(state_.officers[idle[k]], candidates[static_cast<std::size_t>(tours[k].front())]);
  }
}

void Simulator::dispatch(OfficerState& officer, NodeId node) {
  const auto& cells = scenario_.grid.cells;
  const double distance = haversine_meters(cells[static_cast<std::size_t>(officer.at)].centroid,
                                           cells[static_cast<std::size_t>(node)].centroid);
  const double stride = config_.speed_mps * 60.0;
  Minutes ticks = 0;
  while (distance - static_cast<double>(ticks) * stride > 1e-9) ++ticks;
  const Minutes arrival = state_.clock + ticks;
  const Minutes shift_end = day_start() + config_.shift_end_minute;
  if (static_cast<double>(arrival) + stay_at(node) > static_cast<double>(shift_end)) {
    officer.status = OfficerStatus::OffDuty;
    emit({state_.clock, officer.id, EventKind::ShiftEnd, officer.at});
    return;
  }
  emit({state_.clock, officer.id, EventKind::Dispatch, node});
  state_.locked[static_cast<std::size_t>(node)] = true;
  officer.target = node;
  officer.remaining_m = distance;
  officer.status = OfficerStatus::Travelling;
  if (ticks == 0) arrive(officer);
}

void Simulator::end_day() {
  const Minutes shift_end = day_start() + config_.shift_end_minute;
  for (auto& officer : state_.officers) {
    if (officer.status == OfficerStatus::OffDuty) continue;
    if (officer.status == OfficerStatus::Visiting) {
      emit({state_.clock, officer.id, EventKind::VisitEnd, officer.target});
      state_.locked[static_cast<std::size_t>(officer.target)] = false;
      officer.at = officer.target;
    }
    officer.status = OfficerStatus::OffDuty;
    emit({shift_end, officer.id, EventKind::ShiftEnd, officer.at});
  }
  // Every call of the day still open, including those after the shift, goes unanswered.
  const Minutes next_day = day_start() + kMinutesPerDay;
  std::vector<EmergencyCall> open;
  for (auto& calls : state_.pending) {
    open.insert(open.end(), calls.begin(), calls.end());
    calls.clear();
  }
  while (next_call_ < calls_.size() && calls_[next_call_].call_time < next_day) open.push_back(calls_[next_call_++]);
  std::stable_sort(open.begin(), open.end(), [](const EmergencyCall& a, const EmergencyCall& b) {
    return a.call_time != b.call_time ? a.call_time < b.call_time : a.id < b.id;
  });
  for (const auto& c : open) emit({shift_end, -1, EventKind::CallUnattended, c.node, c.priority, 0.0, c.id});
}

EventLog run(const Scenario& scenario, const HotspotMap& hotspots, const SimConfig& config, std::uint64_t seed) {
  if (scenario.n_days() <= 0) throw ConfigError("scenario period is empty");
  int first = 0;
  int last = scenario.n_days();
  if (hotspots.n_days() > 0) {
    first = std::max(0, hotspots.first_day());
    last = std::min(last, hotspots.first_day() + hotspots.n_days());
  }
  if (first >= last) throw ConfigError("no simulation days inside the scenario period");
  Simulator sim(scenario, hotspots, config, seed);
  for (int day = first; day < last; ++day) {
    sim.begin_day(day);
    while (!sim.shift_over()) sim.step();
    sim.end_day();
  }
  return sim.take_log();
}

}  // namespace patrol
