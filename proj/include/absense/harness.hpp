#pragma once

// Scenario configuration and the generate-dataset / run / sweep-error
// commands shared by the CLI and the tests.

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "absense/channel.hpp"
#include "absense/emmodel.hpp"
#include "absense/metrics.hpp"
#include "absense/protocol.hpp"
#include "absense/simulation.hpp"
#include "absense/topology.hpp"
#include "json.hpp"

namespace absense {

/// Configuration problem tied to a dotted field path ("" when not field specific).
class ConfigError : public std::runtime_error {
public:
  ConfigError(std::string field, const std::string& message)
      : std::runtime_error(field.empty() ? message : field + ": " + message),
        field_(std::move(field)) {}
  const std::string& field() const { return field_; }

private:
  std::string field_;
};

struct TopologyConfig {
  std::size_t rows = 30;
  std::size_t cols = 30;
  double pitch_m = 0.010;
  double depth_m = 0.00025;
};

struct SurfaceConfig {
  double frequency_hz = 5e9;
  double r0_ohm = 1.15;
  double c0_farad = 0.99e-12;
  double cell_pitch_m = 0.010;
};

struct GridConfig {
  double r_min_ohm = 0.35;
  double r_max_ohm = 2.15;
  std::size_t r_count = 10;
  double c_min_farad = 0.55e-12;
  double c_max_farad = 1.54e-12;
  std::size_t c_count = 10;
};

struct WaveSetConfig {
  std::vector<double> elevations_deg;  // default 0, 5, ..., 75
  std::vector<double> azimuths_deg{0.0};
  std::vector<Polarization> polarizations{Polarization::TE, Polarization::TM};
  double incident_power_density = 1.0;

  WaveSetConfig();
  /// Polarization-major, then azimuth, then elevation.
  std::vector<WaveAttributes> expand() const;
};

struct SweepConfig {
  std::vector<double> error_fractions{0.5, 0.8, 0.9, 0.95};
  std::vector<int> cycles{1, 4, 8, 12};
  int seeds = 20;    // seeds seed, seed+1, ...
  int threads = 0;   // 0 = hardware concurrency
};

struct Config {
  std::uint64_t seed = 1;
  TopologyConfig topology;
  ChannelConfig channel;
  ProtocolConfig protocol;
  SurfaceConfig surface;
  GridConfig grid;
  WaveSetConfig waves;
  int function_id = 10;  // true wave for run / sweep-error
  std::string dataset_path;       // empty = synthesise
  std::string function_map_path;  // empty = build from the surface model
  SweepConfig sweep;

  /// Throws ConfigError naming the first invalid field.
  void validate() const;
};

/// Unknown keys and wrong types are rejected with the dotted field path.
Config config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const Config& c);
Config load_config(const std::filesystem::path& path);

/// Shared read-only inputs built once per configuration.
struct Inputs {
  std::shared_ptr<const Topology> topology;
  std::shared_ptr<const LinkBudget> budget;
  std::shared_ptr<const PowerFlowDataset> dataset;
  std::shared_ptr<const FunctionMap> map;
};

Inputs build_inputs(const Config& config);

/// Dataset wave index holding the map entry's wave; throws ConfigError if absent.
std::size_t wave_index_for(const Inputs& inputs, int function_id);

Scenario make_scenario(const Config& config, const Inputs& inputs);

struct GenerateResult {
  std::filesystem::path dataset_path;
  std::filesystem::path function_map_path;
  std::size_t map_entries = 0;
  std::size_t distinct_loads = 0;
};

GenerateResult cmd_generate_dataset(const Config& config, const std::filesystem::path& out_dir);

RunReport cmd_run(const Config& config, const std::filesystem::path& out_dir);

struct SweepRow {
  double error_fraction = 0.0;
  int cycles = 0;
  std::uint64_t seed = 0;
  double accuracy = 0.0;
  double final_spread_r_ohm = 0.0;
};

struct SweepCell {
  double error_fraction = 0.0;
  int cycles = 0;
  double mean_accuracy = 0.0;
  double min_accuracy = 0.0;
  double max_accuracy = 0.0;
};

/// Runs every (error, cycles, seed) combination on a worker pool. Rows are
/// sorted by (error, cycles, seed).
std::vector<SweepRow> run_sweep(const Config& config, const Inputs& inputs);
std::vector<SweepCell> summarize_sweep(const std::vector<SweepRow>& rows);

std::vector<SweepCell> cmd_sweep_error(const Config& config, const std::filesystem::path& out_dir);

/// Machine-readable failure record: {"status":"error","command":..,"kind":..,"field":..,"message":..}.
nlohmann::json error_record(const std::string& command, const std::exception& e);

}  // namespace absense
