#pragma once

// Event-driven run of the full protocol over one topology, channel and
// dataset. Deterministic for a given scenario and seed.

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "absense/channel.hpp"
#include "absense/emmodel.hpp"
#include "absense/metrics.hpp"
#include "absense/protocol.hpp"
#include "absense/simcore.hpp"
#include "absense/topology.hpp"

namespace absense {

/// Read-only inputs; the shared parts can back many concurrent runs.
struct Scenario {
  std::shared_ptr<const Topology> topology;
  ChannelConfig channel;
  std::shared_ptr<const LinkBudget> budget;
  std::shared_ptr<const PowerFlowDataset> dataset;
  std::shared_ptr<const FunctionMap> map;
  std::size_t wave_index = 0;
  ProtocolConfig protocol;
  /// When set, the measurement phase is skipped and consensus starts at t = 0
  /// from these per-node estimates.
  std::optional<std::vector<Estimate>> initial_estimates;
  std::string config_json = "{}";

  /// Checks shapes and cross-references; throws std::invalid_argument.
  void validate() const;
};

/// Builds the link budget for the scenario's topology and channel.
std::shared_ptr<const LinkBudget> make_budget(const ChannelConfig& channel,
                                              const Topology& topology);

/// Called after each dispatched event with the node states at that instant.
using EventObserver = std::function<void(const Event&, std::span<const NodeState>)>;

RunReport simulate(const Scenario& scenario, const EventObserver& observer = {});

}  // namespace absense
