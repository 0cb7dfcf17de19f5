#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "patrol/commands.hpp"

namespace {

struct Shared {
  std::string config;
  std::optional<std::uint64_t> seed;
  int jobs = 1;
  std::string out = "out";
};

void add_shared(CLI::App* cmd, Shared& shared) {
  cmd->add_option("--config", shared.config, "JSON run configuration")->required();
  cmd->add_option("--seed", shared.seed, "Override the configured seed");
  cmd->add_option("--jobs", shared.jobs, "Parallel simulations")->check(CLI::PositiveNumber);
  cmd->add_option("--out", shared.out, "Output directory");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Crime hotspot prediction and multi-officer patrol planning"};
  app.require_subcommand(1);
  Shared shared;
  auto* generate = app.add_subcommand("generate", "Write a synthetic scenario as the four input CSVs");
  auto* predict = app.add_subcommand("predict", "Train the hotspot model and write the test-period hotspot map");
  auto* simulate = app.add_subcommand("simulate", "Simulate the first planner and officer count once");
  auto* benchmark = app.add_subcommand("benchmark", "Run the planner x officer count x runs sweep");
  for (auto* cmd : {generate, predict, simulate, benchmark}) add_shared(cmd, shared);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    patrol::RunConfig config = patrol::load_config(shared.config);
    if (shared.seed) config.seed = *shared.seed;
    const patrol::CommandOptions options{shared.out, shared.jobs};
    if (generate->parsed()) patrol::cmd_generate(config, options, std::cerr);
    if (predict->parsed()) patrol::cmd_predict(config, options, std::cerr);
    if (simulate->parsed()) patrol::cmd_simulate(config, options, std::cerr);
    if (benchmark->parsed()) patrol::cmd_benchmark(config, options, std::cerr);
  } catch (const patrol::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
