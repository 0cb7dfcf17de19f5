#include "patrol/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "patrol/timeutil.hpp"

namespace patrol {

namespace {

using nlohmann::json;

// Reads the members of one JSON object and rejects keys nobody asked for.
class Section {
 public:
  Section(const json& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) throw ConfigError(where() + "must be an object");
  }
  Section(const Section&) = delete;
  Section& operator=(const Section&) = delete;
  ~Section() noexcept(false) {
    if (std::uncaught_exceptions() > 0) return;
    for (const auto& [key, value] : node_.items())
      if (!seen_.count(key)) throw ConfigError("unknown config key '" + path_ + key + "'");
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return node_.contains(key);
  }

  template <class T>
  void read(const std::string& key, T& out) {
    if (!has(key)) return;
    try {
      out = node_.at(key).get<T>();
    } catch (const json::exception&) {
      throw ConfigError("config key '" + path_ + key + "' has the wrong type");
    }
  }

  Section child(const std::string& key) {
    seen_.insert(key);
    return Section(node_.at(key), path_ + key + ".");
  }

  std::string name(const std::string& key) const { return path_ + key; }

 private:
  std::string where() const { return path_.empty() ? "config " : "config key '" + path_ + "' "; }

  const json& node_;
  std::string path_;
  std::set<std::string> seen_;
};

Minutes read_date(Section& s, const std::string& key) {
  std::string text;
  s.read(key, text);
  const auto t = parse_timestamp(text);
  if (!t) throw ConfigError("config key '" + s.name(key) + "' is not a date (YYYY-MM-DD)");
  return day_number(*t) * kMinutesPerDay;
}

DateRange read_range(Section& parent, const std::string& key) {
  Section s = parent.child(key);
  DateRange r;
  r.start = read_date(s, "start");
  r.end = read_date(s, "end");
  return r;
}

int read_clock(Section& s, const std::string& key, int fallback) {
  if (!s.has(key)) return fallback;
  std::string text;
  s.read(key, text);
  int h = 0, m = 0;
  char colon = 0;
  std::istringstream in(text);
  if (!(in >> h >> colon >> m) || colon != ':' || h < 0 || h > 24 || m < 0 || m > 59)
    throw ConfigError("config key '" + s.name(key) + "' is not a clock time (HH:MM)");
  return h * 60 + m;
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

}  // namespace

void RunConfig::validate() const {
  if (config_version != kConfigVersion)
    throw ConfigError("unsupported config_version " + std::to_string(config_version) + " (expected " +
                      std::to_string(kConfigVersion) + ")");
  if (data.has_value() == synthetic.has_value()) throw ConfigError("give exactly one of 'data' or 'synthetic'");
  if (data)
    for (const auto* p : {&data->crimes, &data->checkins, &data->pois, &data->calls})
      if (!std::filesystem::exists(*p)) throw ConfigError("input file not found: " + p->string());
  if (hotspots && !std::filesystem::exists(*hotspots))
    throw ConfigError("hotspot map not found: " + hotspots->string());
  if (rows < 1 || cols < 1) throw ConfigError("grid rows and cols must be positive");
  if (!(bbox.max_lat > bbox.min_lat && bbox.max_lon > bbox.min_lon)) throw ConfigError("grid bbox is degenerate");
  if (slot_minutes != kSlotMinutes) throw ConfigError("slot_minutes must be 120");
  if (train.end <= train.start) throw ConfigError("train range is empty");
  if (test.end <= test.start) throw ConfigError("test range is empty");
  if (train.start < test.end && test.start < train.end) throw ConfigError("train and test ranges overlap");
  if (synthetic) {
    const Minutes s0 = day_number(synthetic->start) * kMinutesPerDay;
    const Minutes s1 = s0 + static_cast<Minutes>(synthetic->n_days) * kMinutesPerDay;
    const auto p = period();
    if (p.start < s0 || p.end > s1) throw ConfigError("train/test ranges fall outside the synthetic period");
  }
  if (forest.n_trees < 1 || forest.max_depth < 0 || forest.min_leaf < 1 || forest.feature_subset_size < 0)
    throw ConfigError("forest parameters out of range");
  if (!(vote_threshold >= 0.0 && vote_threshold <= 1.0)) throw ConfigError("vote_threshold must lie in [0, 1]");
  if (!(speed_mps > 0.0)) throw ConfigError("speed_mps must be positive");
  if (!(stay_minutes >= 0.0 && emergency_stay_minutes >= 0.0)) throw ConfigError("stay minutes must be non-negative");
  if (shift_start_minute >= shift_end_minute || shift_end_minute > 24 * 60) throw ConfigError("shift span is empty");
  if (!(salary_rho >= 0.0)) throw ConfigError("salary_rho must be non-negative");
  if (planners.empty()) throw ConfigError("no planners selected");
  if (officer_counts.empty()) throw ConfigError("no officer counts selected");
  for (int n : officer_counts)
    if (n < 1) throw ConfigError("officer counts must be positive");
  if (runs < 1) throw ConfigError("runs must be at least 1");
  optimizer.validate();
}

DateRange RunConfig::period() const { return {std::min(train.start, test.start), std::max(train.end, test.end)}; }

RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  RunConfig c;
  {
    Section root(doc, "");
    if (!root.has("config_version")) throw ConfigError("config_version is missing");
    root.read("config_version", c.config_version);
    if (c.config_version != kConfigVersion)
      throw ConfigError("unsupported config_version " + std::to_string(c.config_version));
    root.read("seed", c.seed);
    root.read("slot_minutes", c.slot_minutes);

    if (root.has("data")) {
      Section d = root.child("data");
      DataPaths paths;
      for (auto [key, field] : {std::pair{"crimes", &paths.crimes}, {"checkins", &paths.checkins},
                                {"pois", &paths.pois}, {"calls", &paths.calls}}) {
        std::string p;
        d.read(key, p);
        if (p.empty()) throw ConfigError("config key 'data." + std::string(key) + "' is missing");
        *field = resolve(base_dir, p);
      }
      c.data = paths;
    }
    if (root.has("grid")) {
      Section g = root.child("grid");
      if (g.has("bbox")) {
        std::vector<double> b;
        g.read("bbox", b);
        if (b.size() != 4) throw ConfigError("grid.bbox needs [min_lat, min_lon, max_lat, max_lon]");
        c.bbox = {b[0], b[1], b[2], b[3]};
      }
      g.read("rows", c.rows);
      g.read("cols", c.cols);
    }
    if (root.has("synthetic")) {
      Section s = root.child("synthetic");
      SyntheticParams p;
      p.start = read_date(s, "start");
      s.read("days", p.n_days);
      s.read("crime_rate", p.crime_rate);
      s.read("call_rate", p.call_rate);
      s.read("checkin_rate", p.checkin_rate);
      s.read("users", p.n_users);
      s.read("venues", p.n_venues);
      s.read("hotspot_fraction", p.hotspot_fraction);
      s.read("hotspot_share", p.hotspot_share);
      if (p.n_days < 1) throw ConfigError("synthetic.days must be positive");
      c.synthetic = p;
    }
    if (c.synthetic) {
      c.synthetic->bbox = c.bbox;
      c.synthetic->rows = c.rows;
      c.synthetic->cols = c.cols;
    }
    if (!root.has("train") || !root.has("test")) throw ConfigError("train and test ranges are required");
    c.train = read_range(root, "train");
    c.test = read_range(root, "test");

    if (root.has("prediction")) {
      Section p = root.child("prediction");
      std::string model = "forest";
      p.read("model", model);
      if (model == "forest") c.predictor = PredictorKind::Forest;
      else if (model == "density") c.predictor = PredictorKind::Density;
      else throw ConfigError("prediction.model must be 'forest' or 'density'");
      p.read("trees", c.forest.n_trees);
      p.read("max_depth", c.forest.max_depth);
      p.read("min_leaf", c.forest.min_leaf);
      p.read("features_per_split", c.forest.feature_subset_size);
      p.read("bootstrap", c.forest.bootstrap);
      p.read("vote_threshold", c.vote_threshold);
      if (p.has("hotspots")) {
        std::string h;
        p.read("hotspots", h);
        c.hotspots = resolve(base_dir, h);
      }
    }
    if (root.has("simulation")) {
      Section s = root.child("simulation");
      s.read("speed_mps", c.speed_mps);
      s.read("stay_minutes", c.stay_minutes);
      s.read("emergency_stay_minutes", c.emergency_stay_minutes);
      c.shift_start_minute = read_clock(s, "shift_start", c.shift_start_minute);
      c.shift_end_minute = read_clock(s, "shift_end", c.shift_end_minute);
      s.read("salary_rho", c.salary_rho);
    }
    if (root.has("benchmark")) {
      Section b = root.child("benchmark");
      if (b.has("planners")) {
        std::vector<std::string> names;
        b.read("planners", names);
        c.planners.clear();
        for (const auto& n : names) c.planners.push_back(parse_planner(n));
      }
      b.read("officer_counts", c.officer_counts);
      b.read("runs", c.runs);
      if (b.has("grouping")) {
        std::vector<std::string> names;
        b.read("grouping", names);
        c.groupings.clear();
        for (const auto& n : names) {
          if (n == "weekly") c.groupings.push_back(Grouping::Weekly);
          else if (n == "monthly") c.groupings.push_back(Grouping::Monthly);
          else throw ConfigError("benchmark.grouping entries must be 'weekly' or 'monthly'");
        }
      }
    }
    if (root.has("optimizer")) {
      Section o = root.child("optimizer");
      auto& p = c.optimizer;
      o.read("population_size", p.population_size);
      o.read("max_iterations", p.max_iterations);
      o.read("elitist_rate", p.elitist_rate);
      o.read("cross_rate", p.cross_rate);
      o.read("mutate_rate", p.mutate_rate);
      o.read("abandon_rate", p.abandon_rate);
      o.read("top_rate", p.top_rate);
      o.read("levy_alpha", p.levy_alpha);
      o.read("levy_exponent", p.levy_exponent);
      o.read("pre_fly", p.pre_fly);
      o.read("local_opt_probability", p.local_opt_probability);
    }
  }
  c.validate();
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str(), path.parent_path());
}

}  // namespace patrol
