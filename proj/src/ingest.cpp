#include "patrol/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <ostream>
#include <set>
#include <sstream>

#include "patrol/csv.hpp"
#include "patrol/timeutil.hpp"

namespace patrol {

BBox GridMap::extent(NodeId id) const {
  const int r = id / cols;
  const int c = id % cols;
  const double h = cell_height_deg();
  const double w = cell_width_deg();
  return {bbox.min_lat + r * h, bbox.min_lon + c * w, bbox.min_lat + (r + 1) * h, bbox.min_lon + (c + 1) * w};
}

GridMap build_grid(const BBox& bbox, int rows, int cols) {
  if (rows < 1 || cols < 1) throw ConfigError("grid needs at least one row and one column");
  if (!(bbox.max_lat > bbox.min_lat) || !(bbox.max_lon > bbox.min_lon))
    throw ConfigError("degenerate bounding box");
  if (bbox.min_lat < -90.0 || bbox.max_lat > 90.0) throw ConfigError("latitude outside [-90, 90]");

  GridMap grid;
  grid.bbox = bbox;
  grid.rows = rows;
  grid.cols = cols;
  const double h = grid.cell_height_deg();
  const double w = grid.cell_width_deg();
  const double mid_lat = (bbox.min_lat + bbox.max_lat) / 2.0;
  const double height_m = haversine_meters({mid_lat - h / 2, bbox.min_lon}, {mid_lat + h / 2, bbox.min_lon});
  const double width_m = haversine_meters({mid_lat, bbox.min_lon}, {mid_lat, bbox.min_lon + w});
  grid.cell_area_m2 = height_m * width_m;

  grid.cells.reserve(static_cast<std::size_t>(rows) * cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      PatrolNode node;
      node.id = r * cols + c;
      node.centroid = {bbox.min_lat + (r + 0.5) * h, bbox.min_lon + (c + 0.5) * w};
      grid.cells.push_back(node);
    }
  }
  return grid;
}

std::optional<NodeId> bin(LatLon p, const GridMap& grid) {
  if (!grid.bbox.contains(p)) return std::nullopt;
  // ceil(x) - 1 puts points on an interior edge into the lower cell.
  auto index = [](double offset, double step, int count) {
    const int i = static_cast<int>(std::ceil(offset / step)) - 1;
    return std::clamp(i, 0, count - 1);
  };
  const int r = index(p.lat - grid.bbox.min_lat, grid.cell_height_deg(), grid.rows);
  const int c = index(p.lon - grid.bbox.min_lon, grid.cell_width_deg(), grid.cols);
  return r * grid.cols + c;
}

std::string format_double(double value) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, end);
}

namespace {

std::optional<double> parse_double(const std::string& text) {
  double value = 0.0;
  const char* first = text.data();
  const char* last = first + text.size();
  while (first != last && *first == ' ') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last || !std::isfinite(value)) return std::nullopt;
  return value;
}

std::optional<LatLon> parse_latlon(const std::string& lat, const std::string& lon) {
  auto a = parse_double(lat);
  auto b = parse_double(lon);
  if (!a || !b || *a < -90.0 || *a > 90.0 || *b < -180.0 || *b > 180.0) return std::nullopt;
  return LatLon{*a, *b};
}

template <class Record>
using RowParser = std::function<std::optional<Record>(const csv::Row&, std::string& why)>;

template <class Record>
LoadResult<Record> read_table(std::istream& in, const std::string& name, const std::vector<std::string>& header,
                              const RowParser<Record>& parse) {
  csv::Reader reader(in);
  csv::Row row;
  if (!reader.next(row)) throw LoadError(name + ": missing header row");
  if (!row.empty() && row[0].rfind("\xEF\xBB\xBF", 0) == 0) row[0].erase(0, 3);
  for (auto& field : row) {
    while (!field.empty() && field.back() == ' ') field.pop_back();
  }
  if (row != header) {
    std::string expected;
    for (const auto& h : header) expected += (expected.empty() ? "" : ",") + h;
    for (std::size_t i = 0; i < std::max(row.size(), header.size()); ++i) {
      if (i >= row.size() || i >= header.size() || row[i] != header[i]) {
        throw LoadError(name + ":1: header mismatch at column " + std::to_string(i + 1) + ", expected `" +
                        expected + "`");
      }
    }
  }

  LoadResult<Record> result;
  while (reader.next(row)) {
    if (row.size() == 1 && row[0].empty()) continue;  // blank line
    std::string why;
    std::optional<Record> record;
    if (row.size() != header.size()) {
      why = "expected " + std::to_string(header.size()) + " columns, got " + std::to_string(row.size());
    } else {
      record = parse(row, why);
    }
    if (record) {
      result.records.push_back(std::move(*record));
    } else {
      ++result.skipped;
      result.warnings.push_back(name + ":" + std::to_string(reader.line()) + ": " + why);
    }
  }
  return result;
}

template <class Record>
LoadResult<Record> load_file(const std::filesystem::path& path,
                             LoadResult<Record> (*reader)(std::istream&, const std::string&)) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError(path.string() + ": cannot open file");
  return reader(in, path.filename().string());
}

template <class Record>
void sort_by_time(std::vector<Record>& records) {
  std::stable_sort(records.begin(), records.end(), [](const Record& a, const Record& b) { return a.time < b.time; });
}

}  // namespace

LoadResult<CrimeRecord> read_crimes(std::istream& in, const std::string& name) {
  RowParser<CrimeRecord> parse = [](const csv::Row& row, std::string& why) -> std::optional<CrimeRecord> {
    auto t = parse_timestamp(row[0]);
    if (!t) return why = "bad timestamp `" + row[0] + "`", std::nullopt;
    auto pos = parse_latlon(row[1], row[2]);
    if (!pos) return why = "bad coordinates", std::nullopt;
    return CrimeRecord{*t, *pos, row[3]};
  };
  auto result = read_table(in, name, {"timestamp", "lat", "lon", "offense_type"}, parse);
  sort_by_time(result.records);
  return result;
}

LoadResult<CheckinRecord> read_checkins(std::istream& in, const std::string& name) {
  RowParser<CheckinRecord> parse = [](const csv::Row& row, std::string& why) -> std::optional<CheckinRecord> {
    auto t = parse_timestamp(row[0]);
    if (!t) return why = "bad timestamp `" + row[0] + "`", std::nullopt;
    auto pos = parse_latlon(row[1], row[2]);
    if (!pos) return why = "bad coordinates", std::nullopt;
    if (row[3].empty()) return why = "empty user_id", std::nullopt;
    return CheckinRecord{*t, *pos, row[3], row[4]};
  };
  auto result = read_table(in, name, {"timestamp", "lat", "lon", "user_id", "venue_id"}, parse);
  sort_by_time(result.records);
  return result;
}

LoadResult<PoiRecord> read_pois(std::istream& in, const std::string& name) {
  RowParser<PoiRecord> parse = [](const csv::Row& row, std::string& why) -> std::optional<PoiRecord> {
    if (row[0].empty()) return why = "empty venue_id", std::nullopt;
    auto pos = parse_latlon(row[1], row[2]);
    if (!pos) return why = "bad coordinates", std::nullopt;
    return PoiRecord{row[0], *pos, row[3]};
  };
  auto result = read_table(in, name, {"venue_id", "lat", "lon", "category"}, parse);
  // Venue ids are unique; later duplicates are skipped.
  std::set<std::string> seen;
  std::vector<PoiRecord> unique;
  for (auto& poi : result.records) {
    if (seen.insert(poi.venue_id).second) {
      unique.push_back(std::move(poi));
    } else {
      ++result.skipped;
      result.warnings.push_back(name + ": duplicate venue_id `" + poi.venue_id + "`");
    }
  }
  result.records = std::move(unique);
  return result;
}

LoadResult<CallRecord> read_calls(std::istream& in, const std::string& name) {
  RowParser<CallRecord> parse = [](const csv::Row& row, std::string& why) -> std::optional<CallRecord> {
    auto t = parse_timestamp(row[0]);
    if (!t) return why = "bad timestamp `" + row[0] + "`", std::nullopt;
    auto pos = parse_latlon(row[1], row[2]);
    if (!pos) return why = "bad coordinates", std::nullopt;
    if (row[3].empty()) return why = "empty call_type", std::nullopt;
    return CallRecord{*t, *pos, row[3]};
  };
  auto result = read_table(in, name, {"timestamp", "lat", "lon", "call_type"}, parse);
  for (const auto& call : result.records) {
    if (!priority_lookup(call.call_type))
      result.warnings.push_back(name + ": unknown call type `" + call.call_type + "` mapped to priority 1");
  }
  sort_by_time(result.records);
  return result;
}

LoadResult<CrimeRecord> load_crimes(const std::filesystem::path& path) { return load_file(path, &read_crimes); }
LoadResult<CheckinRecord> load_checkins(const std::filesystem::path& path) { return load_file(path, &read_checkins); }
LoadResult<PoiRecord> load_pois(const std::filesystem::path& path) { return load_file(path, &read_pois); }
LoadResult<CallRecord> load_calls(const std::filesystem::path& path) { return load_file(path, &read_calls); }

void write_crimes(std::ostream& out, const std::vector<CrimeRecord>& records) {
  csv::write_row(out, {"timestamp", "lat", "lon", "offense_type"});
  for (const auto& r : records)
    csv::write_row(out, {format_timestamp(r.time), format_double(r.pos.lat), format_double(r.pos.lon), r.offense_type});
}

void write_checkins(std::ostream& out, const std::vector<CheckinRecord>& records) {
  csv::write_row(out, {"timestamp", "lat", "lon", "user_id", "venue_id"});
  for (const auto& r : records)
    csv::write_row(out, {format_timestamp(r.time), format_double(r.pos.lat), format_double(r.pos.lon), r.user_id,
                         r.venue_id});
}

void write_pois(std::ostream& out, const std::vector<PoiRecord>& records) {
  csv::write_row(out, {"venue_id", "lat", "lon", "category"});
  for (const auto& r : records)
    csv::write_row(out, {r.venue_id, format_double(r.pos.lat), format_double(r.pos.lon), r.category});
}

void write_calls(std::ostream& out, const std::vector<CallRecord>& records) {
  csv::write_row(out, {"timestamp", "lat", "lon", "call_type"});
  for (const auto& r : records)
    csv::write_row(out, {format_timestamp(r.time), format_double(r.pos.lat), format_double(r.pos.lon), r.call_type});
}

int Scenario::day_of(Minutes t) const { return static_cast<int>(day_number(t) - day_number(start)); }

std::vector<EmergencyCall> Scenario::emergency_calls() const {
  std::vector<EmergencyCall> out;
  out.reserve(calls.size());
  for (std::size_t i = 0; i < calls.size(); ++i) {
    const auto& c = calls[i];
    out.push_back({static_cast<std::int32_t>(i), c.node, c.time, c.call_type, priority_of(c.call_type)});
  }
  return out;
}

Scenario make_scenario(GridMap grid, std::vector<CrimeRecord> crimes, std::vector<CheckinRecord> checkins,
                       std::vector<PoiRecord> pois, std::vector<CallRecord> calls, Minutes start, Minutes end,
                       DropCounts* drops) {
  start = day_number(start) * kMinutesPerDay;
  end = day_number(end) * kMinutesPerDay;
  if (end <= start) throw ConfigError("scenario date range is empty");

  DropCounts counts;
  auto keep = [&](auto& records, bool timed) {
    using Record = typename std::decay_t<decltype(records)>::value_type;
    std::vector<Record> kept;
    kept.reserve(records.size());
    for (auto& r : records) {
      if constexpr (requires(Record x) { x.time; }) {
        if (timed && (r.time < start || r.time >= end)) {
          ++counts.out_of_range;
          continue;
        }
      }
      auto node = bin(r.pos, grid);
      if (!node) {
        ++counts.out_of_bbox;
        continue;
      }
      r.node = *node;
      kept.push_back(std::move(r));
    }
    if constexpr (requires(Record x) { x.time; }) sort_by_time(kept);
    records = std::move(kept);
  };
  keep(crimes, true);
  keep(checkins, true);
  keep(pois, false);
  keep(calls, true);

  std::set<std::string> venues;
  std::erase_if(pois, [&](const PoiRecord& p) {
    const bool dup = !venues.insert(p.venue_id).second;
    counts.duplicate_venues += dup;
    return dup;
  });

  if (drops) *drops = counts;
  Scenario s;
  s.grid = std::move(grid);
  s.crimes = std::move(crimes);
  s.checkins = std::move(checkins);
  s.pois = std::move(pois);
  s.calls = std::move(calls);
  s.start = start;
  s.end = end;
  return s;
}

}  // namespace patrol
