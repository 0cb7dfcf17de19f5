#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string_view>
#include <vector>

#include "patrol/features.hpp"
#include "patrol/ingest.hpp"
#include "patrol/optimize.hpp"
#include "patrol/predict.hpp"

namespace patrol {

struct SimConfig {
  PlannerKind planner = PlannerKind::ImpGreedy;
  int n_officers = 5;
  OptimizerParams optimizer;
  double speed_mps = 1.2;
  double stay_minutes = 10.0;            // hotspot and coldspot visits
  double emergency_stay_minutes = 10.0;  // visits answering a call
  int shift_start_minute = 8 * 60;
  int shift_end_minute = 20 * 60;

  void validate() const;
};

enum class EventKind { Dispatch, Arrival, VisitStart, VisitEnd, CallAttended, CallUnattended, ShiftEnd };

std::string_view to_string(EventKind kind);

struct Event {
  Minutes time = 0;
  OfficerId officer = -1;  // -1 for unattended calls
  EventKind kind = EventKind::Dispatch;
  NodeId node = kNoNode;
  int priority = 0;      // call events only
  double delay = 0.0;    // minutes, call_attended only
  std::int32_t call = -1;

  friend bool operator==(const Event&, const Event&) = default;
};

struct EventLog {
  std::vector<Event> events;
};

/// `time,officer_id,event,node_id,priority,delay_min`; fields that do not
/// apply to an event are left empty.
void write_events_csv(std::ostream& out, const EventLog& log);

struct OfficerState {
  OfficerId id = 0;
  OfficerStatus status = OfficerStatus::Idle;
  NodeId at = kNoNode;      // current cell when not travelling
  NodeId target = kNoNode;  // destination while travelling, visited cell while visiting
  double remaining_m = 0.0;
  Minutes visit_end = 0;
};

struct WorldState {
  Minutes clock = 0;
  int day = 0;
  int slot = -1;
  std::vector<OfficerState> officers;
  std::vector<NodeState> predicted;  // per node, current slot
  std::vector<double> importance;    // per node, current slot
  std::vector<std::vector<EmergencyCall>> pending;  // per node
  std::vector<bool> locked;   // targeted or being visited
  std::vector<bool> covered;  // visited during the current slot

  /// Nodes a planner may route to: unlocked, and either unvisited this slot or
  /// holding a pending call.
  std::vector<NodeId> unassigned() const;
  NodeState state_of(NodeId node) const;
};

/// Minute-tick patrol simulation over the scenario's days.
class Simulator {
 public:
  Simulator(const Scenario& scenario, const HotspotMap& hotspots, SimConfig config, std::uint64_t seed);

  /// Resets officers to cell 0 at shift start of `day` and scans once.
  void begin_day(int day);
  /// Advances one minute: travel, visit completion, call injection, planning.
  void step();
  bool shift_over() const;
  /// Closes the day: ends visits, logs shift ends and unattended calls.
  void end_day();

  const WorldState& state() const { return state_; }
  const EventLog& log() const { return log_; }
  EventLog take_log() { return std::move(log_); }

 private:
  void arrive(OfficerState& officer);
  void attend(NodeId node, OfficerId officer);
  void inject_calls();
  void refresh_slot();
  void plan();
  void dispatch(OfficerState& officer, NodeId node);
  Minutes day_start() const;
  double stay_at(NodeId node) const;
  void emit(Event e) { log_.events.push_back(e); }

  const Scenario& scenario_;
  const HotspotMap& hotspots_;
  SimConfig config_;
  Rng rng_;
  std::shared_ptr<const TravelTable> table_;
  CrimeCounts counts_;
  std::vector<EmergencyCall> calls_;
  std::size_t next_call_ = 0;
  WorldState state_;
  EventLog log_;
};

/// Simulates every day of the scenario with `config.n_officers` officers.
EventLog run(const Scenario& scenario, const HotspotMap& hotspots, const SimConfig& config, std::uint64_t seed);

}  // namespace patrol
