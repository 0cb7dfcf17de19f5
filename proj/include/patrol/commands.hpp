#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>

#include "patrol/config.hpp"
#include "patrol/sim.hpp"

namespace patrol {

struct CommandOptions {
  std::filesystem::path out = "out";
  int jobs = 1;
};

/// Scenario over the config's data period, loaded from CSV or generated.
/// Skipped and dropped rows are reported on `log`.
Scenario build_scenario(const RunConfig& config, std::ostream& log);

struct Prediction {
  HotspotMap map;
  std::optional<ClassificationMetrics> metrics;  // absent when the map was loaded
  std::optional<TreeEnsemble> model;
};

/// Hotspot map for the test range: loaded, forest-predicted or density baseline.
Prediction predict_period(const RunConfig& config, const Scenario& scenario);

SimConfig sim_config(const RunConfig& config, PlannerKind planner, int n_officers);

/// Sub-seed of one sweep cell; a cell re-run with it alone reproduces its log.
std::uint64_t cell_seed(std::uint64_t seed, PlannerKind planner, int n_officers, int run);

EventLog run_cell(const RunConfig& config, const Scenario& scenario, const HotspotMap& map, PlannerKind planner,
                  int n_officers, int run);

/// `<out>/events/<planner>/n<count>/run<k>.csv`
std::filesystem::path cell_events_path(const std::filesystem::path& out, PlannerKind planner, int n_officers,
                                       int run);

/// Writes via a temporary file and rename, so readers never see partial output.
void write_atomically(const std::filesystem::path& path, const std::string& content);

void cmd_generate(const RunConfig& config, const CommandOptions& options, std::ostream& log);
ClassificationMetrics cmd_predict(const RunConfig& config, const CommandOptions& options, std::ostream& log);
void cmd_simulate(const RunConfig& config, const CommandOptions& options, std::ostream& log);
std::vector<MetricReport> cmd_benchmark(const RunConfig& config, const CommandOptions& options, std::ostream& log);

}  // namespace patrol
