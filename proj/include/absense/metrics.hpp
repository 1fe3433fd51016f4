#pragma once

// Run statistics: packet counters, consensus traces, phase durations and
// final per-node outcomes, with tabular and JSON export.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "absense/channel.hpp"
#include "absense/consensus.hpp"
#include "absense/emmodel.hpp"

namespace absense {

struct NodeCounters {
  std::uint64_t sent = 0;
  std::uint64_t received = 0;
  std::uint64_t lost_collision = 0;
  std::uint64_t lost_half_duplex = 0;
  std::uint64_t lost_range = 0;
  bool operator==(const NodeCounters&) const = default;
};

struct TraceSample {
  double time_s = 0.0;
  std::size_t node = 0;
  int cycle = 0;  // 0 = before the first update
  double r_ohm = 0.0;
  double x_ohm = 0.0;
  int f_id = -1;
  bool operator==(const TraceSample&) const = default;
};

struct NodeOutcome {
  int function_id = -1;
  WaveAttributes wave;
  double r_ohm = 0.0;
  double x_ohm = 0.0;
  std::size_t measured_load_id = 0;
  bool operator==(const NodeOutcome& o) const;
};

struct PhaseDurations {
  double measurement_s = 0.0;
  double consensus_s = 0.0;
  double final_time_s = 0.0;
  bool operator==(const PhaseDurations&) const = default;
};

class RunReport {
public:
  std::uint64_t seed = 0;
  std::string config_json = "{}";  // effective configuration echo
  int true_function_id = -1;
  int max_cycles = 0;
  std::vector<NodeCounters> counters;
  std::vector<TraceSample> trace;
  std::vector<NodeOutcome> outcomes;
  PhaseDurations phases;
  std::uint64_t events_dispatched = 0;

  void reset(std::size_t node_count);
  void record_sent(std::size_t node) { ++counters.at(node).sent; }
  void record_reception(std::size_t receiver, Reception status);
  void record_trace(const TraceSample& s) { trace.push_back(s); }

  std::size_t node_count() const { return counters.size(); }

  /// Fraction of nodes whose final function id equals the true one.
  double accuracy() const;

  /// Estimates of every node after `cycle` updates, in node order.
  std::vector<Estimate> estimates_at_cycle(int cycle) const;
};

/// Header: time_s,node,cycle,r_ohm,x_ohm,f_id
void write_trace_csv(const RunReport& report, std::ostream& os);
std::vector<TraceSample> read_trace_csv(std::istream& is);

/// One row per node: counters and final outcome.
void write_nodes_csv(const RunReport& report, std::ostream& os);
/// Restores counters and outcomes into `report`.
void read_nodes_csv(std::istream& is, RunReport& report);

void write_summary_json(const RunReport& report, std::ostream& os);
/// Restores the scalar fields of a summary document into `report`.
void read_summary_json(std::istream& is, RunReport& report);

struct ExportPaths {
  std::filesystem::path trace_csv;
  std::filesystem::path nodes_csv;
  std::filesystem::path summary_json;
};

/// Writes trace.csv, nodes.csv and summary.json under `dir` (created if
/// needed). Throws std::runtime_error naming the path on I/O failure.
ExportPaths export_report(const RunReport& report, const std::filesystem::path& dir);
RunReport import_report(const std::filesystem::path& dir);

}  // namespace absense
