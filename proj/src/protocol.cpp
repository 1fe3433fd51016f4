#include "absense/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace absense {

namespace {

void require(bool ok, const char* field, const std::string& what) {
  if (!ok) throw std::invalid_argument(std::string("protocol.") + field + " " + what);
}

}  // namespace

void ProtocolConfig::validate(const ChannelConfig& channel) const {
  require(measurement_slot_s > 0.0 && std::isfinite(measurement_slot_s), "measurement_slot_s",
          "must be positive");
  require(ttw_s > 0.0 && std::isfinite(ttw_s), "ttw_s", "must be positive");
  require(rd_max_s >= 0.0 && std::isfinite(rd_max_s), "rd_max_s", "must be non-negative");
  require(max_cycles >= 0, "max_cycles", "must be non-negative");
  require(measurement_error_fraction >= 0.0 && measurement_error_fraction < 1.0,
          "measurement_error_fraction", "must lie in [0, 1)");
  require(self_weight > 0.0 && self_weight < 1.0, "self_weight", "must lie in (0, 1)");
  require(cycle_overhead_s >= 0.0 && std::isfinite(cycle_overhead_s), "cycle_overhead_s",
          "must be non-negative");
  const SimTime latest_end = SimTime::from_seconds(rd_max_s) + channel.packet_duration() +
                             channel.guard_interval();
  require(SimTime::from_seconds(ttw_s) > latest_end, "ttw_s",
          "must exceed rd_max_s + packet duration + guard interval (" +
              std::to_string(latest_end.seconds()) + " s)");
}

const char* to_string(Phase p) {
  switch (p) {
    case Phase::MeasureIterate: return "MeasureIterate";
    case Phase::ConsensusSend: return "ConsensusSend";
    case Phase::ConsensusCollect: return "ConsensusCollect";
    case Phase::Done: return "Done";
  }
  return "?";
}

std::vector<std::pair<SimTime, std::size_t>> pulse_broadcast(const LoadGrid& grid, double slot_s) {
  const SimTime slot = SimTime::from_seconds(slot_s);
  std::vector<std::pair<SimTime, std::size_t>> out;
  out.reserve(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k)
    out.emplace_back(slot * static_cast<std::int64_t>(k), k);
  return out;
}

double measure(double true_power_w, double error_fraction, RngStream& rng) {
  const double u = rng.uniform(-error_fraction, error_fraction);
  return std::max(0.0, true_power_w * (1.0 + u));
}

double measure(std::size_t node, std::size_t load_id, const PowerFlowDataset& dataset,
               std::size_t wave_index, double error_fraction, RngStream& rng) {
  if (wave_index >= dataset.waves.size() || load_id >= dataset.grid.size() ||
      node >= dataset.node_count)
    throw std::out_of_range("measure: index outside dataset");
  return measure(dataset.at(wave_index, load_id, node), error_fraction, rng);
}

namespace {

void enter_consensus(NodeState& node, const Estimate& e, const ProtocolConfig& config) {
  node.consensus = ConsensusState(e, config.self_weight);
  node.cycle_counter = 0;
  node.phase = config.max_cycles == 0 ? Phase::Done : Phase::ConsensusSend;
}

}  // namespace

void handle_measurement_slot(NodeState& node, const LoadGrid& grid, std::size_t load_id,
                             double measured_power_w, double omega, const ProtocolConfig& config) {
  if (node.phase != Phase::MeasureIterate)
    throw std::logic_error("measurement slot outside MeasureIterate");
  if (load_id >= grid.size()) throw std::out_of_range("load identifier outside grid");
  node.current_load_id = load_id;
  if (measured_power_w > node.best_power_w) {
    node.best_power_w = measured_power_w;
    node.best_load_id = load_id;
  }
  if (load_id + 1 == grid.size()) {
    const LoadState best = grid.load(node.best_load_id);
    enter_consensus(node, {best.resistance_ohm, best.reactance_ohm(omega)}, config);
  }
}

void seed_estimate(NodeState& node, const Estimate& estimate, const ProtocolConfig& config) {
  enter_consensus(node, estimate, config);
}

void open_window(NodeState& node) {
  if (node.phase != Phase::ConsensusSend) throw std::logic_error("window opened outside ConsensusSend");
  node.phase = Phase::ConsensusCollect;
}

void close_window(NodeState& node, const ProtocolConfig& config) {
  if (node.phase != Phase::ConsensusCollect)
    throw std::logic_error("window closed outside ConsensusCollect");
  node.consensus.set_estimate(consensus_update(node.consensus));
  node.consensus.clear();
  ++node.cycle_counter;
  node.phase = node.cycle_counter >= config.max_cycles ? Phase::Done : Phase::ConsensusSend;
}

std::size_t snap_estimate(const LoadGrid& grid, const Estimate& estimate, double omega) {
  const auto& rs = grid.resistances();
  const auto& cs = grid.capacitances();
  std::vector<double> xs(cs.size());
  for (std::size_t i = 0; i < cs.size(); ++i) xs[i] = LoadState{0.0, cs[i]}.reactance_ohm(omega);
  auto span_of = [](const std::vector<double>& v) {
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    return *hi > *lo ? *hi - *lo : 1.0;
  };
  auto nearest_on = [](const std::vector<double>& axis, double v, double span) {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < axis.size(); ++i) {
      const double d = std::abs(axis[i] - v) / span;
      if (d < best_d) {
        best_d = d;
        best = i;
      }
    }
    return best;
  };
  return grid.id(nearest_on(rs, estimate.r_ohm, span_of(rs)),
                 nearest_on(xs, estimate.x_ohm, span_of(xs)));
}

NodeResult map_estimate(const FunctionMap& map, const Estimate& estimate, double omega) {
  NodeResult r;
  r.snapped_load_id = snap_estimate(map.grid(), estimate, omega);
  const auto hit = reverse_lookup(map, map.grid().load(r.snapped_load_id));
  r.function_id = hit.function_id;
  r.wave = hit.wave;
  return r;
}

const NodeResult& finalize(NodeState& node, const FunctionMap& map, double omega) {
  if (node.phase != Phase::Done) throw std::logic_error("finalize before Done");
  node.result = map_estimate(map, node.consensus.estimate(), omega);
  return *node.result;
}

}  // namespace absense
