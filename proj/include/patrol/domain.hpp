#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace patrol {

/// Wall-clock time in whole minutes since 1970-01-01T00:00 (local time, no zone).
using Minutes = std::int64_t;

using NodeId = std::int32_t;
using OfficerId = std::int32_t;

inline constexpr NodeId kNoNode = -1;

inline constexpr int kSlotMinutes = 120;
inline constexpr int kSlotsPerDay = 24 * 60 / kSlotMinutes;

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct LatLon {
  double lat = 0.0;
  double lon = 0.0;

  friend bool operator==(const LatLon&, const LatLon&) = default;
};

enum class NodeState { Coldspot, Hotspot, Emergency };

std::string_view to_string(NodeState state);

/// Crime arrival intensity per node state: 0 (cold), 2 (hot), 4 (emergency).
constexpr double risk_of(NodeState state) {
  switch (state) {
    case NodeState::Hotspot: return 2.0;
    case NodeState::Emergency: return 4.0;
    case NodeState::Coldspot: break;
  }
  return 0.0;
}

struct PatrolNode {
  NodeId id = kNoNode;
  LatLon centroid;
  NodeState state = NodeState::Coldspot;
  double importance = 0.0;  // recent crime density, >= 0
  int priority = 1;         // 1..5, only emergencies exceed 1
  double stay_minutes = 10.0;
  // Set only for emergency nodes: when the (oldest pending) call arrived.
  std::optional<double> call_time;

  double risk() const { return risk_of(state); }
};

enum class OfficerStatus { Idle, Travelling, Visiting, OffDuty };

std::string_view to_string(OfficerStatus status);

struct Officer {
  OfficerId id = 0;
  LatLon position;
  OfficerStatus status = OfficerStatus::Idle;
  double speed_mps = 1.2;
  Minutes shift_start = 0;
  Minutes shift_end = 0;
  double salary = 0.0;
};

/// Legal status transitions: Idle -> Travelling -> Visiting -> Idle, or any -> OffDuty.
bool can_transition(OfficerStatus from, OfficerStatus to);

struct EmergencyCall {
  std::int32_t id = 0;
  NodeId node = kNoNode;
  Minutes call_time = 0;
  std::string call_type;
  int priority = 1;
};

struct TimeInterval {
  int day = 0;   // days since the scenario start
  int slot = 0;  // 0..kSlotsPerDay-1

  friend auto operator<=>(const TimeInterval&, const TimeInterval&) = default;
};

/// Priority row of the response-type table, or nullopt for unlisted types.
std::optional<int> priority_lookup(std::string_view call_type);

/// Priority 1..5 of a call type; unlisted types are treated as priority 1.
int priority_of(std::string_view call_type);

/// Call types listed for one priority row, in table order.
const std::vector<std::string>& call_types_for(int priority);

/// Patrol reward exp(w) * p * exp(lambda).
double benefit(double importance, int priority, double risk);
double benefit(const PatrolNode& node);

/// Fraction of a call's reward retained when an officer arrives `delay` minutes
/// after the call. Rows: <15, [15,30], (30,60), >=60.
double arrival_multiplier(double delay_minutes, int priority);

double haversine_meters(LatLon a, LatLon b);

/// Straight-line (great-circle) travel time in minutes.
double travel_minutes(LatLon a, LatLon b, double speed_mps);

}  // namespace patrol
