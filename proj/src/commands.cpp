#include "patrol/commands.hpp"

#include <atomic>
#include <exception>
#include <fstream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "patrol/synthetic.hpp"
#include "patrol/timeutil.hpp"

namespace patrol {

namespace {

std::string render(auto&& write) {
  std::ostringstream out;
  write(out);
  return out.str();
}

template <class Record>
std::vector<Record> report_load(LoadResult<Record> result, const std::filesystem::path& path, std::ostream& log) {
  if (result.skipped > 0) {
    log << path.string() << ": skipped " << result.skipped << " rows\n";
    for (const auto& w : result.warnings) log << "  " << w << '\n';
  }
  return std::move(result.records);
}

int day_index(const Scenario& scenario, Minutes t) { return scenario.day_of(t); }

nlohmann::json metrics_json(const ClassificationMetrics& m) {
  return {{"accuracy", m.accuracy}, {"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1},
          {"tp", m.tp},             {"fp", m.fp},               {"tn", m.tn},         {"fn", m.fn}};
}

std::vector<PeriodMetrics> period_metrics(const RunConfig& config, const Scenario& scenario, const EventLog& log) {
  std::vector<PeriodMetrics> all;
  for (auto grouping : config.groupings) {
    const auto periods = split_periods(config.test.start, config.test.end, grouping);
    auto part = evaluate_periods(log, scenario.crimes, periods, config.shift_start_minute, config.shift_end_minute);
    all.insert(all.end(), part.begin(), part.end());
  }
  return all;
}

}  // namespace

Scenario build_scenario(const RunConfig& config, std::ostream& log) {
  const DateRange period = config.period();
  if (config.synthetic) {
    return generate_synthetic(*config.synthetic, derive_seed(config.seed, "synthetic")).scenario;
  }
  const auto& paths = *config.data;
  auto crimes = report_load(load_crimes(paths.crimes), paths.crimes, log);
  auto checkins = report_load(load_checkins(paths.checkins), paths.checkins, log);
  auto pois = report_load(load_pois(paths.pois), paths.pois, log);
  auto calls = report_load(load_calls(paths.calls), paths.calls, log);
  DropCounts drops;
  Scenario s = make_scenario(build_grid(config.bbox, config.rows, config.cols), std::move(crimes), std::move(checkins),
                             std::move(pois), std::move(calls), period.start, period.end, &drops);
  if (drops.out_of_bbox + drops.out_of_range + drops.duplicate_venues > 0)
    log << "dropped " << drops.out_of_bbox << " rows outside the grid, " << drops.out_of_range
        << " outside the date range, " << drops.duplicate_venues << " duplicate venues\n";
  return s;
}

Prediction predict_period(const RunConfig& config, const Scenario& scenario) {
  const int n_nodes = static_cast<int>(scenario.grid.size());
  if (config.hotspots) {
    std::ifstream in(*config.hotspots);
    if (!in) throw ConfigError("cannot open hotspot map " + config.hotspots->string());
    return {HotspotMap::read_csv(in), std::nullopt, std::nullopt};
  }
  const int test_begin = day_index(scenario, config.test.start);
  const int test_end = day_index(scenario, config.test.end);
  if (test_begin < 0 || test_end > scenario.n_days() || test_begin >= test_end)
    throw ConfigError("test range lies outside the data period");
  const FeatureExtractor features(scenario);
  const auto test_rows = features.rows(test_begin, test_end);
  std::vector<int> truth;
  for (const auto& r : test_rows) truth.push_back(r.label == Label::Crime ? 1 : 0);

  Prediction out;
  if (config.predictor == PredictorKind::Density) {
    const DensityPredictor baseline;
    out.map = predict_hotspots(baseline, test_rows, n_nodes);
    std::vector<int> guess;
    for (const auto& r : test_rows) guess.push_back(baseline.is_hotspot(r) ? 1 : 0);
    out.metrics = confusion_metrics(truth, guess);
    return out;
  }
  const int train_begin = day_index(scenario, config.train.start);
  const int train_end = day_index(scenario, config.train.end);
  if (train_begin < 0 || train_end > scenario.n_days() || train_begin >= train_end)
    throw ConfigError("train range lies outside the data period");
  const auto train_rows = features.rows(train_begin, train_end);
  const auto balanced = undersample(train_rows, derive_seed(config.seed, "undersample"));
  out.model = train(to_dataset(balanced), config.forest, derive_seed(config.seed, "forest"));
  out.map = predict_hotspots(*out.model, test_rows, n_nodes, config.vote_threshold);
  out.metrics = evaluate(*out.model, to_dataset(test_rows), config.vote_threshold);
  return out;
}

SimConfig sim_config(const RunConfig& config, PlannerKind planner, int n_officers) {
  SimConfig s;
  s.planner = planner;
  s.n_officers = n_officers;
  s.optimizer = config.optimizer;
  s.speed_mps = config.speed_mps;
  s.stay_minutes = config.stay_minutes;
  s.emergency_stay_minutes = config.emergency_stay_minutes;
  s.shift_start_minute = config.shift_start_minute;
  s.shift_end_minute = config.shift_end_minute;
  return s;
}

std::uint64_t cell_seed(std::uint64_t seed, PlannerKind planner, int n_officers, int run) {
  return derive_seed(seed, to_string(planner), static_cast<std::uint64_t>(n_officers), static_cast<std::uint64_t>(run));
}

EventLog run_cell(const RunConfig& config, const Scenario& scenario, const HotspotMap& map, PlannerKind planner,
                  int n_officers, int run_index) {
  return run(scenario, map, sim_config(config, planner, n_officers),
             cell_seed(config.seed, planner, n_officers, run_index));
}

std::filesystem::path cell_events_path(const std::filesystem::path& out, PlannerKind planner, int n_officers,
                                       int run) {
  return out / "events" / std::string(to_string(planner)) / ("n" + std::to_string(n_officers)) /
         ("run" + std::to_string(run) + ".csv");
}

void write_atomically(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("failed writing " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

void cmd_generate(const RunConfig& config, const CommandOptions& options, std::ostream& log) {
  if (!config.synthetic) throw ConfigError("generate needs a 'synthetic' section");
  const auto s = generate_synthetic(*config.synthetic, derive_seed(config.seed, "synthetic")).scenario;
  write_atomically(options.out / "crimes.csv", render([&](std::ostream& o) { write_crimes(o, s.crimes); }));
  write_atomically(options.out / "checkins.csv", render([&](std::ostream& o) { write_checkins(o, s.checkins); }));
  write_atomically(options.out / "pois.csv", render([&](std::ostream& o) { write_pois(o, s.pois); }));
  write_atomically(options.out / "calls.csv", render([&](std::ostream& o) { write_calls(o, s.calls); }));
  log << "wrote " << s.crimes.size() << " crimes, " << s.checkins.size() << " check-ins, " << s.pois.size()
      << " venues, " << s.calls.size() << " calls to " << options.out.string() << '\n';
}

ClassificationMetrics cmd_predict(const RunConfig& config, const CommandOptions& options, std::ostream& log) {
  if (config.hotspots) throw ConfigError("predict computes a hotspot map; remove prediction.hotspots");
  const Scenario scenario = build_scenario(config, log);
  const Prediction p = predict_period(config, scenario);
  write_atomically(options.out / "hotspots.csv", render([&](std::ostream& o) { p.map.write_csv(o); }));
  if (p.model) write_atomically(options.out / "model.json", p.model->to_json());
  write_atomically(options.out / "prediction_metrics.json", metrics_json(*p.metrics).dump(2) + "\n");
  log << "accuracy " << p.metrics->accuracy << ", f1 " << p.metrics->f1 << ", " << p.map.hotspot_count()
      << " hotspot node-slots\n";
  return *p.metrics;
}

void cmd_simulate(const RunConfig& config, const CommandOptions& options, std::ostream& log) {
  const Scenario scenario = build_scenario(config, log);
  const Prediction p = predict_period(config, scenario);
  const PlannerKind planner = config.planners.front();
  const int n = config.officer_counts.front();
  const EventLog events = run_cell(config, scenario, p.map, planner, n, 0);
  write_atomically(options.out / "events.csv", render([&](std::ostream& o) { write_events_csv(o, events); }));
  const auto metrics = period_metrics(config, scenario, events);
  const auto rows = aggregate(std::string(to_string(planner)), n, {metrics});
  write_atomically(options.out / "report.csv", render([&](std::ostream& o) { write_report_csv(o, rows); }));
  const double total = robustness(events);
  log << to_string(planner) << " with " << n << " officers: robustness " << total << ", net objective "
      << net_objective(total, n, config.salary_rho) << '\n';
}

std::vector<MetricReport> cmd_benchmark(const RunConfig& config, const CommandOptions& options, std::ostream& log) {
  const Scenario scenario = build_scenario(config, log);
  const Prediction p = predict_period(config, scenario);
  if (p.metrics) log << "prediction accuracy " << p.metrics->accuracy << '\n';

  struct Cell {
    PlannerKind planner;
    int n_officers;
    int run;
  };
  std::vector<Cell> cells;
  for (auto planner : config.planners)
    for (int n : config.officer_counts)
      for (int r = 0; r < config.runs; ++r) cells.push_back({planner, n, r});

  std::vector<std::vector<PeriodMetrics>> results(cells.size());
  std::vector<std::exception_ptr> errors(cells.size());
  std::atomic<std::size_t> next{0};
  std::mutex log_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      const Cell& c = cells[i];
      try {
        const EventLog events = run_cell(config, scenario, p.map, c.planner, c.n_officers, c.run);
        write_atomically(cell_events_path(options.out, c.planner, c.n_officers, c.run),
                         render([&](std::ostream& o) { write_events_csv(o, events); }));
        results[i] = period_metrics(config, scenario, events);
        std::lock_guard lock(log_mutex);
        log << to_string(c.planner) << " n=" << c.n_officers << " run=" << c.run << " done\n";
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int jobs = std::max(1, std::min<int>(options.jobs, static_cast<int>(cells.size())));
  std::vector<std::thread> pool;
  for (int j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  std::vector<MetricReport> report;
  std::size_t i = 0;
  for (auto planner : config.planners)
    for (int n : config.officer_counts) {
      std::vector<std::vector<PeriodMetrics>> runs(results.begin() + static_cast<std::ptrdiff_t>(i),
                                                   results.begin() + static_cast<std::ptrdiff_t>(i + config.runs));
      i += static_cast<std::size_t>(config.runs);
      auto rows = aggregate(std::string(to_string(planner)), n, runs);
      report.insert(report.end(), rows.begin(), rows.end());
    }
  write_atomically(options.out / "report.csv", render([&](std::ostream& o) { write_report_csv(o, report); }));
  log << "wrote " << cells.size() << " simulations and " << report.size() << " report rows to "
      << options.out.string() << '\n';
  return report;
}

}  // namespace patrol
