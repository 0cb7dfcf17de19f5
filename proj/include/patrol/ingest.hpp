#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "patrol/domain.hpp"

namespace patrol {

class LoadError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct BBox {
  double min_lat = 0.0;
  double min_lon = 0.0;
  double max_lat = 0.0;
  double max_lon = 0.0;

  bool contains(LatLon p) const {
    return p.lat >= min_lat && p.lat <= max_lat && p.lon >= min_lon && p.lon <= max_lon;
  }
};

/// Equal lat/lon cells over a bounding box, row-major from the (min lat, min lon) corner.
struct GridMap {
  BBox bbox;
  int rows = 0;
  int cols = 0;
  std::vector<PatrolNode> cells;
  double cell_area_m2 = 0.0;

  std::size_t size() const { return cells.size(); }
  double cell_height_deg() const { return (bbox.max_lat - bbox.min_lat) / rows; }
  double cell_width_deg() const { return (bbox.max_lon - bbox.min_lon) / cols; }
  /// Lat/lon extent of one cell.
  BBox extent(NodeId id) const;
};

GridMap build_grid(const BBox& bbox, int rows, int cols);

/// Cell containing `p`; points on a shared edge go to the lower cell index.
std::optional<NodeId> bin(LatLon p, const GridMap& grid);

struct CrimeRecord {
  Minutes time = 0;
  LatLon pos;
  std::string offense_type;
  NodeId node = kNoNode;
};

struct CheckinRecord {
  Minutes time = 0;
  LatLon pos;
  std::string user_id;
  std::string venue_id;
  NodeId node = kNoNode;
};

struct PoiRecord {
  std::string venue_id;
  LatLon pos;
  std::string category;
  NodeId node = kNoNode;
};

struct CallRecord {
  Minutes time = 0;
  LatLon pos;
  std::string call_type;
  NodeId node = kNoNode;
};

template <class Record>
struct LoadResult {
  std::vector<Record> records;
  std::size_t skipped = 0;
  std::vector<std::string> warnings;  // one line per skipped row
};

LoadResult<CrimeRecord> load_crimes(const std::filesystem::path& path);
LoadResult<CheckinRecord> load_checkins(const std::filesystem::path& path);
LoadResult<PoiRecord> load_pois(const std::filesystem::path& path);
LoadResult<CallRecord> load_calls(const std::filesystem::path& path);

LoadResult<CrimeRecord> read_crimes(std::istream& in, const std::string& name = "crimes.csv");
LoadResult<CheckinRecord> read_checkins(std::istream& in, const std::string& name = "checkins.csv");
LoadResult<PoiRecord> read_pois(std::istream& in, const std::string& name = "pois.csv");
LoadResult<CallRecord> read_calls(std::istream& in, const std::string& name = "calls.csv");

void write_crimes(std::ostream& out, const std::vector<CrimeRecord>& records);
void write_checkins(std::ostream& out, const std::vector<CheckinRecord>& records);
void write_pois(std::ostream& out, const std::vector<PoiRecord>& records);
void write_calls(std::ostream& out, const std::vector<CallRecord>& records);

/// Shortest decimal text that parses back to the same double.
std::string format_double(double value);

/// Records binned to a grid over a day-aligned date range [start, end).
struct Scenario {
  GridMap grid;
  std::vector<CrimeRecord> crimes;
  std::vector<CheckinRecord> checkins;
  std::vector<PoiRecord> pois;
  std::vector<CallRecord> calls;
  Minutes start = 0;
  Minutes end = 0;
  int slot_minutes = kSlotMinutes;

  int n_days() const { return static_cast<int>((end - start) / (24 * 60)); }
  /// Day offset of a timestamp relative to `start`.
  int day_of(Minutes t) const;
  /// Emergency calls in time order with ids equal to their index in `calls`.
  std::vector<EmergencyCall> emergency_calls() const;
};

struct DropCounts {
  std::size_t out_of_bbox = 0;
  std::size_t out_of_range = 0;
  std::size_t duplicate_venues = 0;
};

/// Bins every record and drops those outside the bbox or date range. `start`
/// and `end` are truncated to day boundaries; `end` is exclusive.
Scenario make_scenario(GridMap grid, std::vector<CrimeRecord> crimes, std::vector<CheckinRecord> checkins,
                       std::vector<PoiRecord> pois, std::vector<CallRecord> calls, Minutes start, Minutes end,
                       DropCounts* drops = nullptr);

}  // namespace patrol
