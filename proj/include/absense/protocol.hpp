#pragma once

// Per-node state machine: lock-step measurement over the load grid, then
// max_cycles send/collect consensus windows, then reverse lookup.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "absense/channel.hpp"
#include "absense/consensus.hpp"
#include "absense/emmodel.hpp"
#include "absense/simcore.hpp"

namespace absense {

struct ProtocolConfig {
  double measurement_slot_s = 1e-7;  // TTM
  double ttw_s = 1.2e-8;             // collection window
  double rd_max_s = 1e-8;            // random delay upper bound
  int max_cycles = 10;
  double measurement_error_fraction = 0.0;  // epsilon
  std::uint64_t rng_seed = 0;
  double self_weight = 0.5;
  double cycle_overhead_s = 0.0;  // idle time between a window close and the next cycle

  /// Throws std::invalid_argument naming the field. Requires the delayed
  /// packet plus its guard interval to end strictly inside the window.
  void validate(const ChannelConfig& channel) const;
};

enum class Phase : std::uint8_t { MeasureIterate, ConsensusSend, ConsensusCollect, Done };

const char* to_string(Phase p);

struct NodeResult {
  int function_id = -1;
  WaveAttributes wave;
  std::size_t snapped_load_id = 0;
};

struct NodeState {
  Phase phase = Phase::MeasureIterate;
  std::size_t current_load_id = 0;  // last announced identifier
  std::size_t best_load_id = 0;
  double best_power_w = -1.0;  // below any measurable power
  ConsensusState consensus;
  int cycle_counter = 0;
  std::optional<NodeResult> result;
};

/// Announcement times k * slot for every grid identifier.
std::vector<std::pair<SimTime, std::size_t>> pulse_broadcast(const LoadGrid& grid, double slot_s);

/// P_true * (1 + u), u ~ U[-eps, eps], floored at zero. Always consumes one draw.
double measure(double true_power_w, double error_fraction, RngStream& rng);
double measure(std::size_t node, std::size_t load_id, const PowerFlowDataset& dataset,
               std::size_t wave_index, double error_fraction, RngStream& rng);

/// Strict-improvement argmax step. After the last identifier the node moves
/// to ConsensusSend (or Done when max_cycles is 0) holding the best load's (R, X).
void handle_measurement_slot(NodeState& node, const LoadGrid& grid, std::size_t load_id,
                             double measured_power_w, double omega, const ProtocolConfig& config);

/// Skips measurement and starts consensus from a given estimate.
void seed_estimate(NodeState& node, const Estimate& estimate, const ProtocolConfig& config);

/// ConsensusSend -> ConsensusCollect.
void open_window(NodeState& node);

/// Applies the weighted update, clears the log, advances the cycle counter.
void close_window(NodeState& node, const ProtocolConfig& config);

/// Nearest grid point to an (R, X) estimate, per axis in span-normalised units.
std::size_t snap_estimate(const LoadGrid& grid, const Estimate& estimate, double omega);

/// Function id reported for an estimate: snap, then reverse lookup.
NodeResult map_estimate(const FunctionMap& map, const Estimate& estimate, double omega);

/// Requires Done; stores and returns the node's result.
const NodeResult& finalize(NodeState& node, const FunctionMap& map, double omega);

}  // namespace absense
