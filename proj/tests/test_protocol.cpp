#include <stdexcept>
#include <cmath>
#include <sstream>

#include "absense/harness.hpp"
#include "absense/protocol.hpp"
#include "absense/simulation.hpp"
#include "doctest.h"

using namespace absense;

namespace {

const Inputs& default_inputs() {
  static const Inputs in = build_inputs(Config{});
  return in;
}

Config small_config(std::size_t rows, std::size_t cols) {
  Config c;
  c.topology.rows = rows;
  c.topology.cols = cols;
  return c;
}

std::string export_string(const RunReport& r) {
  std::ostringstream os;
  write_trace_csv(r, os);
  write_nodes_csv(r, os);
  write_summary_json(r, os);
  return os.str();
}

}  // namespace

TEST_SUITE("protocol") {
  TEST_CASE("pulse schedule") {
    const auto s = pulse_broadcast(LoadGrid::default_grid(), 1e-7);
    REQUIRE(s.size() == 100);
    CHECK(s.front().first == SimTime{});
    CHECK(s.back().first.seconds() == doctest::Approx(9.9e-6).epsilon(1e-15));
    CHECK(s.back().second == 99);
    const auto one = pulse_broadcast(LoadGrid({1.0}, {1e-12}), 1e-7);
    REQUIRE(one.size() == 1);
    CHECK(one[0].first == SimTime{});
    const auto four = pulse_broadcast(LoadGrid({1.0, 2.0}, {1e-12, 2e-12}), 1.0);
    REQUIRE(four.size() == 4);
    for (std::size_t k = 0; k < 4; ++k) CHECK(four[k].first.seconds() == static_cast<double>(k));
  }

  TEST_CASE("measurement noise model") {
    RngStream rng(1, 0, StreamPurpose::MeasurementNoise);
    CHECK(measure(3.3e-5, 0.0, rng) == 3.3e-5);
    for (int i = 0; i < 10000; ++i) {
      const double v = measure(1e-4, 0.9, rng);
      REQUIRE(v >= 1e-5 * (1 - 1e-12));
      REQUIRE(v <= 1.9e-4 * (1 + 1e-12));
      REQUIRE(measure(0.0, 0.9, rng) == 0.0);
    }
  }

  TEST_CASE("argmax step: strict improvement, transition after the last identifier") {
    const LoadGrid g({1.0, 2.0}, {1e-12, 2e-12});
    ProtocolConfig pc;
    const double w = 2.0 * kPi * 5e9;

    NodeState dec;
    const double decreasing[] = {4.0, 3.0, 2.0, 1.0};
    for (std::size_t k = 0; k < 4; ++k) {
      CHECK(dec.phase == Phase::MeasureIterate);
      handle_measurement_slot(dec, g, k, decreasing[k], w, pc);
    }
    CHECK(dec.best_load_id == 0);
    CHECK(dec.phase == Phase::ConsensusSend);
    CHECK(dec.consensus.estimate().r_ohm == 1.0);
    CHECK(dec.consensus.estimate().x_ohm == doctest::Approx(-1.0 / (w * 1e-12)));
    CHECK_THROWS_AS(handle_measurement_slot(dec, g, 0, 1.0, w, pc), std::logic_error);

    NodeState tie;
    const double tied[] = {1.0, 5.0, 5.0, 2.0};
    for (std::size_t k = 0; k < 4; ++k) handle_measurement_slot(tie, g, k, tied[k], w, pc);
    CHECK(tie.best_load_id == 1);

    NodeState zero;
    for (std::size_t k = 0; k < 4; ++k) handle_measurement_slot(zero, g, k, 0.0, w, pc);
    CHECK(zero.best_load_id == 0);

    pc.max_cycles = 0;
    NodeState none;
    for (std::size_t k = 0; k < 4; ++k) handle_measurement_slot(none, g, k, 1.0, w, pc);
    CHECK(none.phase == Phase::Done);
  }

  TEST_CASE("cycle state machine and isolated node") {
    ProtocolConfig pc;
    pc.max_cycles = 3;
    NodeState n;
    seed_estimate(n, {1.2, -30.0}, pc);
    for (int c = 0; c < 3; ++c) {
      CHECK(n.phase == Phase::ConsensusSend);
      CHECK_THROWS_AS(close_window(n, pc), std::logic_error);
      open_window(n);
      CHECK(n.phase == Phase::ConsensusCollect);
      close_window(n, pc);
    }
    CHECK(n.phase == Phase::Done);
    CHECK(n.cycle_counter == 3);
    CHECK(n.consensus.estimate() == Estimate{1.2, -30.0});
    CHECK_THROWS_AS(open_window(n), std::logic_error);
  }

  TEST_CASE("protocol config validation") {
    const ChannelConfig ch;
    ProtocolConfig pc;
    CHECK_NOTHROW(pc.validate(ch));
    pc.ttw_s = 1.1e-8;  // == rd_max + duration + guard
    CHECK_THROWS_AS(pc.validate(ch), std::invalid_argument);
    pc = {};
    pc.measurement_error_fraction = 1.0;
    CHECK_THROWS_AS(pc.validate(ch), std::invalid_argument);
    pc = {};
    pc.max_cycles = -1;
    CHECK_THROWS_AS(pc.validate(ch), std::invalid_argument);
  }

  TEST_CASE("snapping an estimate to the grid") {
    const auto map = *default_inputs().map;
    const double w = 2.0 * kPi * 5e9;
    for (std::size_t k = 0; k < map.grid().size(); ++k) {
      const auto l = map.grid().load(k);
      REQUIRE(snap_estimate(map.grid(), {l.resistance_ohm, l.reactance_ohm(w)}, w) == k);
    }
    const auto r = map_estimate(map, {1.76, map.at(10).load.reactance_ohm(w) + 0.3}, w);
    CHECK(r.function_id == 10);
  }

  TEST_CASE("default run: lock-step, packet bound, phase durations, zero-noise accuracy") {
    const Config cfg;
    const auto& in = default_inputs();
    const Scenario sc = make_scenario(cfg, in);
    const SimTime measurement_end = SimTime::from_seconds(1e-5);
    bool lockstep = true;
    std::size_t events = 0;
    const auto rep = simulate(sc, [&](const Event& e, std::span<const NodeState> nodes) {
      ++events;
      if (e.time < measurement_end)
        for (const auto& n : nodes)
          if (n.current_load_id != nodes[0].current_load_id || n.phase != Phase::MeasureIterate)
            lockstep = false;
    });
    CHECK(lockstep);
    CHECK(events == rep.events_dispatched);
    for (const auto& c : rep.counters) CHECK(c.sent == 10);
    CHECK(rep.phases.measurement_s == 1e-5);
    CHECK(rep.phases.consensus_s == doctest::Approx(1.2e-7).epsilon(1e-12));
    CHECK(rep.phases.final_time_s == doctest::Approx(1.012e-5).epsilon(1e-14));
    CHECK(rep.accuracy() == 1.0);
    CHECK(rep.true_function_id == 10);
    for (const auto& o : rep.outcomes) CHECK(o.measured_load_id == in.map->at(10).grid_id);
  }

  TEST_CASE("received never exceeds what in-range neighbours sent") {
    Config cfg;
    cfg.protocol.measurement_error_fraction = 0.5;
    const auto& in = default_inputs();
    const auto rep = simulate(make_scenario(cfg, in));
    for (std::size_t i = 0; i < rep.node_count(); ++i) {
      const auto& c = rep.counters[i];
      std::uint64_t neighbour_sent = 0;
      for (std::size_t j : in.budget->audience(i)) neighbour_sent += rep.counters[j].sent;
      CHECK(c.received <= neighbour_sent);
      CHECK(c.received + c.lost_collision + c.lost_half_duplex + c.lost_range ==
            10 * (rep.node_count() - 1));
    }
  }

  TEST_CASE("zero noise: every node measures its wave's map load for every function") {
    Config cfg = small_config(6, 6);
    const Inputs in = build_inputs(cfg);
    for (const auto& e : in.map->entries()) {
      cfg.function_id = e.function_id;
      const auto rep = simulate(make_scenario(cfg, in));
      // Oracle: the exhaustive argmax of the wave's true power row.
      const std::size_t w = wave_index_for(in, e.function_id);
      std::size_t best = 0;
      for (std::size_t k = 1; k < in.dataset->grid.size(); ++k)
        if (in.dataset->at(w, k, 0) > in.dataset->at(w, best, 0)) best = k;
      for (const auto& o : rep.outcomes) {
        CHECK(o.measured_load_id == best);
        CHECK(in.map->at(o.function_id).grid_id == e.grid_id);
      }
    }
  }

  TEST_CASE("single-node topology reports the true function") {
    const Config cfg = small_config(1, 1);
    const auto rep = simulate(make_scenario(cfg, build_inputs(cfg)));
    CHECK(rep.accuracy() == 1.0);
    CHECK(rep.counters[0].sent == 10);
    CHECK(rep.counters[0].received == 0);
  }

  TEST_CASE("isolated nodes keep a constant trace") {
    Config cfg = small_config(1, 2);
    cfg.topology.pitch_m = 1.0;  // far beyond the reception radius
    cfg.protocol.measurement_error_fraction = 0.9;
    const auto rep = simulate(make_scenario(cfg, build_inputs(cfg)));
    for (std::size_t node = 0; node < 2; ++node) {
      const TraceSample* first = nullptr;
      int samples = 0;
      for (const auto& s : rep.trace) {
        if (s.node != node) continue;
        ++samples;
        if (!first) first = &s;
        CHECK(s.r_ohm == first->r_ohm);
        CHECK(s.x_ohm == first->x_ohm);
      }
      CHECK(samples == 11);
      CHECK(rep.counters[node].received == 0);
    }
  }

  TEST_CASE("seed determinism: identical event streams and byte-identical reports") {
    Config cfg;
    cfg.protocol.measurement_error_fraction = 0.9;
    cfg.seed = 77;
    const auto& in = default_inputs();
    auto trace_events = [&](std::vector<std::tuple<std::int64_t, std::uint64_t, int>>& out) {
      return simulate(make_scenario(cfg, in), [&](const Event& e, std::span<const NodeState>) {
        out.emplace_back(e.time.ticks(), e.sequence, static_cast<int>(e.kind));
      });
    };
    std::vector<std::tuple<std::int64_t, std::uint64_t, int>> ea, eb;
    const auto a = trace_events(ea);
    const auto b = trace_events(eb);
    CHECK(ea == eb);
    CHECK(export_string(a) == export_string(b));
    cfg.seed = 78;
    const auto c = simulate(make_scenario(cfg, in));
    CHECK(export_string(c) != export_string(a));
  }

  TEST_CASE("variance of noisy initial estimates contracts every cycle") {
    Config cfg;
    cfg.protocol.measurement_error_fraction = 0.9;
    cfg.channel.collisions_enabled = false;
    const auto& in = default_inputs();
    for (std::uint64_t seed : {1u, 2u, 3u}) {
      cfg.seed = seed;
      const auto rep = simulate(make_scenario(cfg, in));
      double prev = variance(rep.estimates_at_cycle(0)).r_ohm;
      for (int c = 1; c <= 10; ++c) {
        const double v = variance(rep.estimates_at_cycle(c)).r_ohm;
        CHECK(v < prev);
        prev = v;
      }
    }
  }

  TEST_CASE("scenario validation") {
    const Config cfg;
    const auto& in = default_inputs();
    Scenario sc = make_scenario(cfg, in);
    sc.wave_index = 99;
    CHECK_THROWS_AS(simulate(sc), std::invalid_argument);
    sc = make_scenario(cfg, in);
    sc.initial_estimates = std::vector<Estimate>(3);
    CHECK_THROWS_AS(simulate(sc), std::invalid_argument);
  }
}
