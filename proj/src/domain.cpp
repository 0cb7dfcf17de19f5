#include "patrol/domain.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <numbers>

namespace patrol {

namespace {

constexpr double kEarthRadiusMeters = 6371008.8;

std::string normalize(std::string_view text) {
  auto begin = text.find_first_not_of(" \t\r\n");
  if (begin == std::string_view::npos) return {};
  auto end = text.find_last_not_of(" \t\r\n");
  std::string out;
  out.reserve(end - begin + 1);
  for (char c : text.substr(begin, end - begin + 1))
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  return out;
}

// Response-type table, one row per priority (1..5).
const std::array<std::vector<std::string>, 5>& priority_table() {
  static const std::array<std::vector<std::string>, 5> table = {{
      {"False Alarms", "Nauisance Mischief", "Missing Person", "Missing Property", "Trespass",
       "Fraud call", "Mental health", "prowl"},
      {"Animal complaints", "Theft", "Disturbances", "hazards", "shoplifting", "property damage",
       "suspicious circumstances"},
      {"Burglary", "Liquor violations", "Narcotics complaints"},
      {"Assaults", "Sex Offender", "Prostitution", "Reckless burning", "Robbery", "Threats",
       "Harassment"},
      {"Accident", "Arrest", "Homicide", "Person Down/Injury", "Weapons calls"},
  }};
  return table;
}

}  // namespace

std::string_view to_string(NodeState state) {
  switch (state) {
    case NodeState::Coldspot: return "coldspot";
    case NodeState::Hotspot: return "hotspot";
    case NodeState::Emergency: return "emergency";
  }
  return "?";
}

std::string_view to_string(OfficerStatus status) {
  switch (status) {
    case OfficerStatus::Idle: return "idle";
    case OfficerStatus::Travelling: return "travelling";
    case OfficerStatus::Visiting: return "visiting";
    case OfficerStatus::OffDuty: return "off_duty";
  }
  return "?";
}

bool can_transition(OfficerStatus from, OfficerStatus to) {
  if (to == OfficerStatus::OffDuty) return true;
  switch (from) {
    case OfficerStatus::Idle: return to == OfficerStatus::Travelling;
    case OfficerStatus::Travelling: return to == OfficerStatus::Visiting;
    case OfficerStatus::Visiting: return to == OfficerStatus::Idle;
    case OfficerStatus::OffDuty: return false;
  }
  return false;
}

std::optional<int> priority_lookup(std::string_view call_type) {
  const std::string key = normalize(call_type);
  if (key.empty()) return std::nullopt;
  // The table spells "Nauisance"; accept the dictionary spelling too.
  if (key == "nuisance mischief") return 1;
  const auto& table = priority_table();
  for (std::size_t row = 0; row < table.size(); ++row) {
    for (const auto& type : table[row]) {
      if (normalize(type) == key) return static_cast<int>(row) + 1;
    }
  }
  return std::nullopt;
}

int priority_of(std::string_view call_type) { return priority_lookup(call_type).value_or(1); }

const std::vector<std::string>& call_types_for(int priority) {
  const auto& table = priority_table();
  const int row = std::clamp(priority, 1, 5) - 1;
  return table[static_cast<std::size_t>(row)];
}

double benefit(double importance, int priority, double risk) {
  return std::exp(importance) * static_cast<double>(priority) * std::exp(risk);
}

double benefit(const PatrolNode& node) { return benefit(node.importance, node.priority, node.risk()); }

double arrival_multiplier(double delay_minutes, int priority) {
  if (delay_minutes < 15.0) return 1.0;
  if (delay_minutes <= 30.0) return priority <= 3 ? 0.8 : 0.0;
  if (delay_minutes < 60.0) return priority <= 2 ? 0.6 : 0.0;
  return priority <= 1 ? 0.5 : 0.0;
}

double haversine_meters(LatLon a, LatLon b) {
  constexpr double deg = std::numbers::pi / 180.0;
  const double dlat = (b.lat - a.lat) * deg;
  const double dlon = (b.lon - a.lon) * deg;
  const double s = std::sin(dlat / 2.0);
  const double t = std::sin(dlon / 2.0);
  const double h = s * s + std::cos(a.lat * deg) * std::cos(b.lat * deg) * t * t;
  return 2.0 * kEarthRadiusMeters * std::asin(std::min(1.0, std::sqrt(h)));
}

double travel_minutes(LatLon a, LatLon b, double speed_mps) {
  if (!(speed_mps > 0.0)) throw ConfigError("travel speed must be positive");
  return haversine_meters(a, b) / speed_mps / 60.0;
}

}  // namespace patrol
