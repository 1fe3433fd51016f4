// absense: dataset generation, single protocol runs and error sweeps.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "absense/harness.hpp"

using namespace absense;

namespace {

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::optional<double> epsilon;
  std::optional<int> cycles;
  std::optional<int> function_id;
  std::optional<std::string> dataset;
  std::optional<std::string> map;
  std::optional<int> threads;
  std::optional<int> seeds;
};

void add_common(CLI::App* sub, Common& c, bool run_options) {
  sub->add_option("--config", c.config, "JSON configuration file (defaults apply when omitted)");
  sub->add_option("--seed", c.seed, "Random seed (overrides the config)");
  sub->add_option("--out", c.out, "Output directory")->required();
  if (run_options) {
    sub->add_option("--epsilon", c.epsilon, "Measurement error fraction");
    sub->add_option("--cycles", c.cycles, "Consensus cycles");
    sub->add_option("--function-id", c.function_id, "True function id of the impinging wave");
    sub->add_option("--dataset", c.dataset, "Power-flow dataset file");
    sub->add_option("--map", c.map, "Function map file");
  }
}

Config resolve(const Common& c) {
  Config cfg = c.config.empty() ? Config{} : load_config(c.config);
  if (c.seed) cfg.seed = *c.seed;
  if (c.epsilon) cfg.protocol.measurement_error_fraction = *c.epsilon;
  if (c.cycles) cfg.protocol.max_cycles = *c.cycles;
  if (c.function_id) cfg.function_id = *c.function_id;
  if (c.dataset) cfg.dataset_path = *c.dataset;
  if (c.map) cfg.function_map_path = *c.map;
  if (c.threads) cfg.sweep.threads = *c.threads;
  if (c.seeds) cfg.sweep.seeds = *c.seeds;
  cfg.protocol.rng_seed = cfg.seed;
  cfg.validate();
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Networked metasurface wave sensing simulator"};
  app.require_subcommand(1);

  Common gen, run, sweep;
  auto* gen_cmd = app.add_subcommand("generate-dataset", "Write the power-flow dataset and function map");
  add_common(gen_cmd, gen, false);
  auto* run_cmd = app.add_subcommand("run", "Simulate one sensing run and export its report");
  add_common(run_cmd, run, true);
  auto* sweep_cmd = app.add_subcommand("sweep-error", "Accuracy over measurement error and cycle counts");
  add_common(sweep_cmd, sweep, true);
  sweep_cmd->add_option("--threads", sweep.threads, "Worker threads (0 = all cores)");
  sweep_cmd->add_option("--seeds", sweep.seeds, "Seeds per (error, cycles) cell");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    nlohmann::json rec = {{"status", "error"}, {"command", "cli"}, {"kind", "usage"},
                          {"message", e.what()}};
    std::cerr << rec.dump() << '\n';
    return 2;
  }

  std::string command = app.get_subcommands().front()->get_name();
  try {
    if (*gen_cmd) {
      const Config cfg = resolve(gen);
      const auto r = cmd_generate_dataset(cfg, gen.out);
      nlohmann::json ok = {{"status", "ok"},
                           {"command", command},
                           {"dataset", r.dataset_path.string()},
                           {"function_map", r.function_map_path.string()},
                           {"map_entries", r.map_entries},
                           {"distinct_loads", r.distinct_loads}};
      std::cout << ok.dump() << '\n';
    } else if (*run_cmd) {
      const Config cfg = resolve(run);
      const RunReport rep = cmd_run(cfg, run.out);
      nlohmann::json ok = {{"status", "ok"},
                           {"command", command},
                           {"seed", rep.seed},
                           {"true_function_id", rep.true_function_id},
                           {"accuracy", rep.accuracy()},
                           {"final_time_s", rep.phases.final_time_s},
                           {"out", run.out}};
      std::cout << ok.dump() << '\n';
    } else if (*sweep_cmd) {
      const Config cfg = resolve(sweep);
      const auto cells = cmd_sweep_error(cfg, sweep.out);
      nlohmann::json table = nlohmann::json::array();
      for (const auto& c : cells)
        table.push_back({{"error_fraction", c.error_fraction},
                         {"cycles", c.cycles},
                         {"mean_accuracy", c.mean_accuracy}});
      nlohmann::json ok = {{"status", "ok"}, {"command", command}, {"cells", table}, {"out", sweep.out}};
      std::cout << ok.dump() << '\n';
    }
  } catch (const std::exception& e) {
    std::cerr << error_record(command, e).dump() << '\n';
    return 1;
  }
  return 0;
}
