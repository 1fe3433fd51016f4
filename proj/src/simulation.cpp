#include "absense/simulation.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace absense {

void Scenario::validate() const {
  if (!topology || !budget || !dataset || !map)
    throw std::invalid_argument("scenario is missing topology, budget, dataset or map");
  channel.validate();
  protocol.validate(channel);
  dataset->validate();
  const std::size_t n = topology->node_count();
  if (budget->node_count() != n)
    throw std::invalid_argument("link budget built for a different topology");
  if (dataset->node_count != n && !(dataset->node_count == 1 && dataset->uniform_across_nodes()))
    throw std::invalid_argument("dataset has " + std::to_string(dataset->node_count) +
                                " nodes, topology has " + std::to_string(n));
  if (wave_index >= dataset->waves.size())
    throw std::invalid_argument("wave_index " + std::to_string(wave_index) + " outside dataset (" +
                                std::to_string(dataset->waves.size()) + " waves)");
  if (!(dataset->grid == map->grid()))
    throw std::invalid_argument("dataset and function map use different load grids");
  if (initial_estimates && initial_estimates->size() != n)
    throw std::invalid_argument("initial_estimates size does not match node count");
}

std::shared_ptr<const LinkBudget> make_budget(const ChannelConfig& channel,
                                              const Topology& topology) {
  return std::make_shared<const LinkBudget>(channel, topology);
}

namespace {

class Engine {
public:
  Engine(const Scenario& s, const EventObserver& observer)
      : s_(s),
        observer_(observer),
        n_(s.topology->node_count()),
        omega_(2.0 * kPi * s.dataset->frequency_hz),
        nodes_(n_),
        duration_(s.channel.packet_duration()),
        guard_(s.channel.guard_interval()),
        ttw_(SimTime::from_seconds(s.protocol.ttw_s)),
        overhead_(SimTime::from_seconds(s.protocol.cycle_overhead_s)) {
    noise_.reserve(n_);
    delay_.reserve(n_);
    for (std::size_t i = 0; i < n_; ++i) {
      noise_.emplace_back(s.protocol.rng_seed, i, StreamPurpose::MeasurementNoise);
      delay_.emplace_back(s.protocol.rng_seed, i, StreamPurpose::RandomDelay);
    }
    report_.reset(n_);
    report_.seed = s.protocol.rng_seed;
    report_.config_json = s.config_json;
    report_.max_cycles = s.protocol.max_cycles;
    const int fid = s.map->find(s.dataset->waves[s.wave_index]);
    report_.true_function_id = fid;
  }

  RunReport run() {
    const LoadGrid& grid = s_.dataset->grid;
    if (s_.initial_estimates) {
      for (std::size_t i = 0; i < n_; ++i) seed_estimate(nodes_[i], (*s_.initial_estimates)[i], s_.protocol);
      consensus_start_ = SimTime{};
      start_consensus(consensus_start_);
    } else {
      const SimTime slot = SimTime::from_seconds(s_.protocol.measurement_slot_s);
      for (const auto& [t, k] : pulse_broadcast(grid, s_.protocol.measurement_slot_s)) {
        queue_.schedule(t, EventKind::PulseAnnounce, PulsePayload{k});
        queue_.schedule(t + slot, EventKind::MeasurementDue, MeasurementPayload{k});
      }
    }

    const SimTime end = queue_.run_until_quiescent([this](const Event& e) {
      dispatch(e);
      if (observer_) observer_(e, nodes_);
    });

    for (std::size_t i = 0; i < n_; ++i) {
      if (nodes_[i].phase != Phase::Done) throw std::logic_error("node not done at quiescence");
      const NodeResult& r = finalize(nodes_[i], *s_.map, omega_);
      NodeOutcome& o = report_.outcomes[i];
      o.function_id = r.function_id;
      o.wave = r.wave;
      o.r_ohm = nodes_[i].consensus.estimate().r_ohm;
      o.x_ohm = nodes_[i].consensus.estimate().x_ohm;
      o.measured_load_id = nodes_[i].best_load_id;
    }
    report_.phases.measurement_s = consensus_start_.seconds();
    report_.phases.consensus_s = (end - consensus_start_).seconds();
    report_.phases.final_time_s = end.seconds();
    report_.events_dispatched = queue_.dispatched();
    return std::move(report_);
  }

private:
  void dispatch(const Event& e) {
    switch (e.kind) {
      case EventKind::PulseAnnounce: {
        const auto k = std::get<PulsePayload>(e.payload).load_id;
        for (auto& node : nodes_) node.current_load_id = k;
        break;
      }
      case EventKind::MeasurementDue: on_measurement(e); break;
      case EventKind::PacketAirStart: break;  // the cycle's list is already complete
      case EventKind::PacketAirEnd: on_air_end(e); break;
      case EventKind::WindowClose: on_window_close(e); break;
    }
  }

  void on_measurement(const Event& e) {
    const auto k = std::get<MeasurementPayload>(e.payload).load_id;
    const PowerFlowDataset& ds = *s_.dataset;
    const bool shared_row = ds.node_count == 1;
    for (std::size_t i = 0; i < n_; ++i) {
      const double p = measure(shared_row ? 0 : i, k, ds, s_.wave_index,
                               s_.protocol.measurement_error_fraction, noise_[i]);
      handle_measurement_slot(nodes_[i], ds.grid, k, p, omega_, s_.protocol);
    }
    if (k + 1 == ds.grid.size()) {
      consensus_start_ = e.time;
      start_consensus(e.time);
    }
  }

  void start_consensus(SimTime t) {
    trace_all(t, 0);
    if (s_.protocol.max_cycles > 0) begin_cycle(0, t);
  }

  void begin_cycle(int cycle, SimTime start) {
    cycle_ = cycle;
    tx_.clear();
    tx_.reserve(n_);
    const SimTime rd_max = SimTime::from_seconds(s_.protocol.rd_max_s);
    for (std::size_t i = 0; i < n_; ++i) {
      open_window(nodes_[i]);
      const SimTime rd = SimTime::from_seconds(delay_[i].uniform(0.0, rd_max.seconds()));
      const Estimate& est = nodes_[i].consensus.estimate();
      Transmission t;
      t.sender = i;
      t.start = start + rd;
      t.end = t.start + duration_;
      t.packet = ConsensusPacket::from_estimate(i, est.r_ohm, est.x_ohm);
      tx_.push_back(t);
    }
    // Canonical on-air order lets arbitration scan only the overlapping slice.
    std::stable_sort(tx_.begin(), tx_.end(), [](const Transmission& a, const Transmission& b) {
      if (a.start != b.start) return a.start < b.start;
      return a.sender < b.sender;
    });
    for (std::size_t j = 0; j < tx_.size(); ++j) {
      queue_.schedule(tx_[j].start, EventKind::PacketAirStart, PacketPayload{tx_[j].sender, j});
      queue_.schedule(tx_[j].end + guard_, EventKind::PacketAirEnd, PacketPayload{tx_[j].sender, j});
      report_.record_sent(tx_[j].sender);
    }
    queue_.schedule(start + ttw_, EventKind::WindowClose, WindowPayload{cycle});
  }

  void on_air_end(const Event& e) {
    const auto& pp = std::get<PacketPayload>(e.payload);
    const std::size_t j = pp.transmission;
    const Transmission& t = tx_[j];

    // Everything that can overlap t (same duration, guard-extended) starts
    // within (t.start - duration - guard, t.end + guard).
    const SimTime lo_time = t.start - duration_ - guard_;
    const SimTime hi_time = t.end + guard_;
    std::size_t lo = j;
    while (lo > 0 && tx_[lo - 1].start > lo_time) --lo;
    std::size_t hi = j + 1;
    while (hi < tx_.size() && tx_[hi].start < hi_time) ++hi;
    const std::span<const Transmission> window(tx_.data() + lo, hi - lo);

    const ConsensusPacket wire =
        decode_frame(encode_frame(t.packet, s_.channel.packet_bits), s_.channel.packet_bits);
    const auto& audience = s_.budget->audience(t.sender);
    std::size_t a = 0;
    for (std::size_t r = 0; r < n_; ++r) {
      if (r == t.sender) continue;
      if (a < audience.size() && audience[a] == r) {
        ++a;
        const auto o = evaluate_reception(s_.channel, *s_.budget, r, window, j - lo);
        report_.record_reception(r, o.status);
        if (o.status == Reception::Decoded)
          nodes_[r].consensus.record(wire.sender_id, {wire.r_ohm(), wire.x_ohm()}, o.rx_power_w);
      } else {
        report_.record_reception(r, Reception::LostRange);
      }
    }
  }

  void on_window_close(const Event& e) {
    const int cycle = std::get<WindowPayload>(e.payload).cycle;
    for (auto& node : nodes_) close_window(node, s_.protocol);
    trace_all(e.time, cycle + 1);
    if (cycle + 1 < s_.protocol.max_cycles) begin_cycle(cycle + 1, e.time + overhead_);
  }

  void trace_all(SimTime t, int cycle) {
    for (std::size_t i = 0; i < n_; ++i) {
      const Estimate& est = nodes_[i].consensus.estimate();
      const NodeResult r = map_estimate(*s_.map, est, omega_);
      report_.record_trace({t.seconds(), i, cycle, est.r_ohm, est.x_ohm, r.function_id});
    }
  }

  const Scenario& s_;
  const EventObserver& observer_;
  std::size_t n_;
  double omega_;
  std::vector<NodeState> nodes_;
  std::vector<RngStream> noise_;
  std::vector<RngStream> delay_;
  SimTime duration_;
  SimTime guard_;
  SimTime ttw_;
  SimTime overhead_;
  EventQueue queue_;
  std::vector<Transmission> tx_;
  int cycle_ = 0;
  SimTime consensus_start_;
  RunReport report_;
};

}  // namespace

RunReport simulate(const Scenario& scenario, const EventObserver& observer) {
  scenario.validate();
  Engine engine(scenario, observer);
  return engine.run();
}

}  // namespace absense
