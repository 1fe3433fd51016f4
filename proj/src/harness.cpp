#include "absense/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <mutex>
#include <set>
#include <thread>

#include "absense/consensus.hpp"
#include "absense/dataset_io.hpp"

namespace absense {

using nlohmann::json;

WaveSetConfig::WaveSetConfig() {
  for (int e = 0; e <= 75; e += 5) elevations_deg.push_back(e);
}

std::vector<WaveAttributes> WaveSetConfig::expand() const {
  std::vector<WaveAttributes> out;
  for (Polarization p : polarizations)
    for (double az : azimuths_deg)
      for (double el : elevations_deg) out.push_back({az, el, p, incident_power_density});
  return out;
}

namespace {

// Reads one JSON object, remembering which keys were consumed so leftovers
// can be reported as unknown fields.
class Section {
public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_.empty() ? "<root>" : path_, "expected an object");
  }

  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  const json* find(const std::string& key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  void number(const std::string& key, double& out) {
    if (const json* v = find(key)) {
      if (!v->is_number()) throw ConfigError(field(key), "expected a number");
      out = v->get<double>();
    }
  }

  template <typename Int>
  void integer(const std::string& key, Int& out) {
    if (const json* v = find(key)) {
      if (!v->is_number_integer()) throw ConfigError(field(key), "expected an integer");
      if constexpr (std::is_unsigned_v<Int>) {
        if (v->is_number_unsigned() || v->get<std::int64_t>() >= 0)
          out = v->get<Int>();
        else
          throw ConfigError(field(key), "expected a non-negative integer");
      } else {
        out = v->get<Int>();
      }
    }
  }

  void boolean(const std::string& key, bool& out) {
    if (const json* v = find(key)) {
      if (!v->is_boolean()) throw ConfigError(field(key), "expected true or false");
      out = v->get<bool>();
    }
  }

  void string(const std::string& key, std::string& out) {
    if (const json* v = find(key)) {
      if (!v->is_string()) throw ConfigError(field(key), "expected a string");
      out = v->get<std::string>();
    }
  }

  template <typename T>
  void list(const std::string& key, std::vector<T>& out) {
    if (const json* v = find(key)) {
      if (!v->is_array()) throw ConfigError(field(key), "expected an array");
      std::vector<T> tmp;
      for (std::size_t i = 0; i < v->size(); ++i) {
        const json& e = (*v)[i];
        const std::string f = field(key) + "[" + std::to_string(i) + "]";
        if constexpr (std::is_same_v<T, int>) {
          if (!e.is_number_integer()) throw ConfigError(f, "expected an integer");
        } else {
          if (!e.is_number()) throw ConfigError(f, "expected a number");
        }
        tmp.push_back(e.get<T>());
      }
      out = std::move(tmp);
    }
  }

  template <typename Fn>
  void object(const std::string& key, Fn&& fn) {
    if (const json* v = find(key)) {
      Section sub(*v, field(key));
      fn(sub);
      sub.finish();
    }
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key())) throw ConfigError(field(it.key()), "unknown field");
  }

private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

void check(bool ok, const std::string& field, const std::string& message) {
  if (!ok) throw ConfigError(field, message);
}

bool positive(double v) { return v > 0.0 && std::isfinite(v); }

}  // namespace

void Config::validate() const {
  check(topology.rows > 0, "topology.rows", "must be positive");
  check(topology.cols > 0, "topology.cols", "must be positive");
  check(positive(topology.pitch_m), "topology.pitch_m", "must be positive");
  check(topology.depth_m >= 0.0 && std::isfinite(topology.depth_m), "topology.depth_m",
        "must be non-negative");
  try {
    channel.validate();
  } catch (const std::invalid_argument& e) {
    std::string msg = e.what();
    const auto sp = msg.find(' ');
    throw ConfigError(msg.substr(0, sp), msg.substr(sp + 1));
  }
  try {
    protocol.validate(channel);
  } catch (const std::invalid_argument& e) {
    std::string msg = e.what();
    const auto sp = msg.find(' ');
    throw ConfigError(msg.substr(0, sp), msg.substr(sp + 1));
  }
  check(positive(surface.frequency_hz), "surface.frequency_hz", "must be positive");
  check(positive(surface.r0_ohm), "surface.r0_ohm", "must be positive");
  check(positive(surface.c0_farad), "surface.c0_farad", "must be positive");
  check(positive(surface.cell_pitch_m), "surface.cell_pitch_m", "must be positive");
  check(grid.r_count > 0, "grid.r_count", "must be positive");
  check(grid.c_count > 0, "grid.c_count", "must be positive");
  check(grid.r_min_ohm >= 0.0 && grid.r_max_ohm >= grid.r_min_ohm, "grid.r_max_ohm",
        "must satisfy 0 <= r_min_ohm <= r_max_ohm");
  check(grid.c_min_farad > 0.0 && grid.c_max_farad >= grid.c_min_farad, "grid.c_max_farad",
        "must satisfy 0 < c_min_farad <= c_max_farad");
  check(grid.r_count == 1 || grid.r_max_ohm > grid.r_min_ohm, "grid.r_max_ohm",
        "must exceed r_min_ohm when r_count > 1");
  check(grid.c_count == 1 || grid.c_max_farad > grid.c_min_farad, "grid.c_max_farad",
        "must exceed c_min_farad when c_count > 1");
  check(!waves.elevations_deg.empty(), "waves.elevations_deg", "must not be empty");
  check(!waves.azimuths_deg.empty(), "waves.azimuths_deg", "must not be empty");
  check(!waves.polarizations.empty(), "waves.polarizations", "must not be empty");
  const auto ws = waves.expand();
  for (std::size_t i = 0; i < ws.size(); ++i) {
    try {
      ws[i].validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError("waves", e.what());
    }
  }
  check(positive(waves.incident_power_density), "waves.incident_power_density",
        "must be positive");
  check(function_id >= 0, "function_id", "must be non-negative");
  if (dataset_path.empty() && function_map_path.empty())
    check(static_cast<std::size_t>(function_id) < ws.size(), "function_id",
          "must index the configured wave set (" + std::to_string(ws.size()) + " functions)");
  check(!sweep.error_fractions.empty(), "sweep.error_fractions", "must not be empty");
  for (double e : sweep.error_fractions)
    check(e >= 0.0 && e < 1.0, "sweep.error_fractions", "values must lie in [0, 1)");
  check(!sweep.cycles.empty(), "sweep.cycles", "must not be empty");
  for (int c : sweep.cycles) check(c >= 0, "sweep.cycles", "values must be non-negative");
  check(sweep.seeds > 0, "sweep.seeds", "must be positive");
  check(sweep.threads >= 0, "sweep.threads", "must be non-negative");
}

Config config_from_json(const json& j) {
  Config c;
  Section root(j, "");
  root.integer("seed", c.seed);
  root.object("topology", [&](Section& s) {
    s.integer("rows", c.topology.rows);
    s.integer("cols", c.topology.cols);
    s.number("pitch_m", c.topology.pitch_m);
    s.number("depth_m", c.topology.depth_m);
  });
  root.object("channel", [&](Section& s) {
    s.number("carrier_hz", c.channel.carrier_hz);
    s.number("noise_dbnw", c.channel.noise_dbnw);
    s.number("sinr_threshold_db", c.channel.sinr_threshold_db);
    s.number("guard_interval_s", c.channel.guard_interval_s);
    s.number("bitrate_bps", c.channel.bitrate_bps);
    s.integer("packet_bits", c.channel.packet_bits);
    s.number("tx_power_dbnw", c.channel.tx_power_dbnw);
    s.number("path_loss_exponent", c.channel.path_loss_exponent);
    s.number("reference_distance_m", c.channel.reference_distance_m);
    s.number("reference_loss_db", c.channel.reference_loss_db);
    s.boolean("collisions_enabled", c.channel.collisions_enabled);
  });
  root.object("protocol", [&](Section& s) {
    s.number("measurement_slot_s", c.protocol.measurement_slot_s);
    s.number("ttw_s", c.protocol.ttw_s);
    s.number("rd_max_s", c.protocol.rd_max_s);
    s.integer("max_cycles", c.protocol.max_cycles);
    s.number("measurement_error_fraction", c.protocol.measurement_error_fraction);
    s.number("self_weight", c.protocol.self_weight);
    s.number("cycle_overhead_s", c.protocol.cycle_overhead_s);
  });
  root.object("surface", [&](Section& s) {
    s.number("frequency_hz", c.surface.frequency_hz);
    s.number("r0_ohm", c.surface.r0_ohm);
    s.number("c0_farad", c.surface.c0_farad);
    s.number("cell_pitch_m", c.surface.cell_pitch_m);
  });
  root.object("grid", [&](Section& s) {
    s.number("r_min_ohm", c.grid.r_min_ohm);
    s.number("r_max_ohm", c.grid.r_max_ohm);
    s.integer("r_count", c.grid.r_count);
    s.number("c_min_farad", c.grid.c_min_farad);
    s.number("c_max_farad", c.grid.c_max_farad);
    s.integer("c_count", c.grid.c_count);
  });
  root.object("waves", [&](Section& s) {
    s.list("elevations_deg", c.waves.elevations_deg);
    s.list("azimuths_deg", c.waves.azimuths_deg);
    if (const json* v = s.find("polarizations")) {
      if (!v->is_array()) throw ConfigError(s.field("polarizations"), "expected an array");
      c.waves.polarizations.clear();
      for (std::size_t i = 0; i < v->size(); ++i) {
        const std::string f = s.field("polarizations") + "[" + std::to_string(i) + "]";
        if (!(*v)[i].is_string()) throw ConfigError(f, "expected \"TE\" or \"TM\"");
        try {
          c.waves.polarizations.push_back(polarization_from_string((*v)[i].get<std::string>()));
        } catch (const std::exception&) {
          throw ConfigError(f, "expected \"TE\" or \"TM\"");
        }
      }
    }
    s.number("incident_power_density", c.waves.incident_power_density);
  });
  root.integer("function_id", c.function_id);
  root.string("dataset_path", c.dataset_path);
  root.string("function_map_path", c.function_map_path);
  root.object("sweep", [&](Section& s) {
    s.list("error_fractions", c.sweep.error_fractions);
    s.list("cycles", c.sweep.cycles);
    s.integer("seeds", c.sweep.seeds);
    s.integer("threads", c.sweep.threads);
  });
  root.finish();
  // Seed lives at the top level; the protocol copy is derived from it.
  c.protocol.rng_seed = c.seed;
  c.validate();
  return c;
}

json config_to_json(const Config& c) {
  json pols = json::array();
  for (Polarization p : c.waves.polarizations) pols.push_back(to_string(p));
  return {
      {"seed", c.seed},
      {"topology",
       {{"rows", c.topology.rows},
        {"cols", c.topology.cols},
        {"pitch_m", c.topology.pitch_m},
        {"depth_m", c.topology.depth_m}}},
      {"channel",
       {{"carrier_hz", c.channel.carrier_hz},
        {"noise_dbnw", c.channel.noise_dbnw},
        {"sinr_threshold_db", c.channel.sinr_threshold_db},
        {"guard_interval_s", c.channel.guard_interval_s},
        {"bitrate_bps", c.channel.bitrate_bps},
        {"packet_bits", c.channel.packet_bits},
        {"tx_power_dbnw", c.channel.tx_power_dbnw},
        {"path_loss_exponent", c.channel.path_loss_exponent},
        {"reference_distance_m", c.channel.reference_distance_m},
        {"reference_loss_db", c.channel.reference_loss_db},
        {"collisions_enabled", c.channel.collisions_enabled}}},
      {"protocol",
       {{"measurement_slot_s", c.protocol.measurement_slot_s},
        {"ttw_s", c.protocol.ttw_s},
        {"rd_max_s", c.protocol.rd_max_s},
        {"max_cycles", c.protocol.max_cycles},
        {"measurement_error_fraction", c.protocol.measurement_error_fraction},
        {"self_weight", c.protocol.self_weight},
        {"cycle_overhead_s", c.protocol.cycle_overhead_s}}},
      {"surface",
       {{"frequency_hz", c.surface.frequency_hz},
        {"r0_ohm", c.surface.r0_ohm},
        {"c0_farad", c.surface.c0_farad},
        {"cell_pitch_m", c.surface.cell_pitch_m}}},
      {"grid",
       {{"r_min_ohm", c.grid.r_min_ohm},
        {"r_max_ohm", c.grid.r_max_ohm},
        {"r_count", c.grid.r_count},
        {"c_min_farad", c.grid.c_min_farad},
        {"c_max_farad", c.grid.c_max_farad},
        {"c_count", c.grid.c_count}}},
      {"waves",
       {{"elevations_deg", c.waves.elevations_deg},
        {"azimuths_deg", c.waves.azimuths_deg},
        {"polarizations", pols},
        {"incident_power_density", c.waves.incident_power_density}}},
      {"function_id", c.function_id},
      {"dataset_path", c.dataset_path},
      {"function_map_path", c.function_map_path},
      {"sweep",
       {{"error_fractions", c.sweep.error_fractions},
        {"cycles", c.sweep.cycles},
        {"seeds", c.sweep.seeds},
        {"threads", c.sweep.threads}}},
  };
}

Config load_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("", "cannot open config file '" + path.string() + "'");
  json j;
  try {
    j = json::parse(is);
  } catch (const json::parse_error& e) {
    throw ConfigError("", "malformed config '" + path.string() + "': " + e.what());
  }
  return config_from_json(j);
}

namespace {

LoadGrid make_grid(const GridConfig& g) {
  return LoadGrid::linear(g.r_min_ohm, g.r_max_ohm, g.r_count, g.c_min_farad, g.c_max_farad,
                          g.c_count);
}

SurfaceModel make_surface(const SurfaceConfig& s) {
  return SurfaceModel::calibrated(s.frequency_hz, s.r0_ohm, s.c0_farad, s.cell_pitch_m);
}

}  // namespace

Inputs build_inputs(const Config& config) {
  config.validate();
  Inputs in;
  auto topo = std::make_shared<Topology>(config.topology.rows, config.topology.cols,
                                         config.topology.pitch_m, config.topology.depth_m);
  in.topology = topo;
  in.budget = make_budget(config.channel, *topo);

  const SurfaceModel model = make_surface(config.surface);
  const auto waves = config.waves.expand();
  if (config.dataset_path.empty()) {
    in.dataset = std::make_shared<const PowerFlowDataset>(
        synthesize_dataset(waves, make_grid(config.grid), model, topo->node_count()));
  } else {
    if (!std::filesystem::exists(config.dataset_path))
      throw ConfigError("dataset_path", "file not found: '" + config.dataset_path + "'");
    in.dataset = std::make_shared<const PowerFlowDataset>(load_dataset(config.dataset_path));
  }
  if (config.function_map_path.empty()) {
    in.map = std::make_shared<const FunctionMap>(
        build_function_map(config.dataset_path.empty() ? waves : in.dataset->waves,
                           in.dataset->grid, model));
  } else {
    if (!std::filesystem::exists(config.function_map_path))
      throw ConfigError("function_map_path", "file not found: '" + config.function_map_path + "'");
    in.map = std::make_shared<const FunctionMap>(load_function_map(config.function_map_path));
  }

  const std::size_t n = topo->node_count();
  if (in.dataset->node_count != n && in.dataset->node_count != 1)
    throw ConfigError("dataset_path", "dataset covers " + std::to_string(in.dataset->node_count) +
                                          " nodes but the topology has " + std::to_string(n));
  if (in.dataset->node_count == 1 && n != 1 && !in.dataset->uniform_across_nodes())
    throw ConfigError("dataset_path", "single-node dataset cannot cover the topology");
  if (!(in.dataset->grid == in.map->grid()))
    throw ConfigError("function_map_path", "load grid differs from the dataset's grid");
  return in;
}

std::size_t wave_index_for(const Inputs& inputs, int function_id) {
  if (function_id < 0 || static_cast<std::size_t>(function_id) >= inputs.map->size())
    throw ConfigError("function_id", "no map entry " + std::to_string(function_id) + " (map has " +
                                         std::to_string(inputs.map->size()) + " entries)");
  const WaveAttributes& w = inputs.map->at(function_id).wave;
  for (std::size_t i = 0; i < inputs.dataset->waves.size(); ++i)
    if (inputs.dataset->waves[i].same_function(w)) return i;
  throw ConfigError("function_id", "dataset has no wave for map entry " + std::to_string(function_id));
}

Scenario make_scenario(const Config& config, const Inputs& inputs) {
  Scenario s;
  s.topology = inputs.topology;
  s.channel = config.channel;
  s.budget = inputs.budget;
  s.dataset = inputs.dataset;
  s.map = inputs.map;
  s.wave_index = wave_index_for(inputs, config.function_id);
  s.protocol = config.protocol;
  s.protocol.rng_seed = config.seed;
  Config echo = config;
  echo.protocol.rng_seed = config.seed;
  s.config_json = config_to_json(echo).dump();
  return s;
}

GenerateResult cmd_generate_dataset(const Config& config, const std::filesystem::path& out_dir) {
  Config c = config;
  c.dataset_path.clear();
  c.function_map_path.clear();
  c.validate();
  const SurfaceModel model = make_surface(c.surface);
  const LoadGrid grid = make_grid(c.grid);
  const auto waves = c.waves.expand();
  const std::size_t nodes = c.topology.rows * c.topology.cols;
  const PowerFlowDataset ds = synthesize_dataset(waves, grid, model, nodes);
  const FunctionMap map = build_function_map(waves, grid, model);

  // Self-test: every entry's load must look up an entry with that same load
  // (itself, or the lowest id sharing the load).
  for (const auto& e : map.entries()) {
    const auto hit = reverse_lookup(map, e.load);
    if (map.at(hit.function_id).grid_id != e.grid_id)
      throw std::logic_error("function map self-test failed for entry " +
                             std::to_string(e.function_id));
  }

  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory '" + out_dir.string() + "': " + ec.message());
  GenerateResult r;
  r.dataset_path = out_dir / "dataset.txt";
  r.function_map_path = out_dir / "function_map.txt";
  save_dataset(ds, r.dataset_path);
  save_function_map(map, model.operating_frequency_hz, r.function_map_path);
  r.map_entries = map.size();
  std::set<std::size_t> loads;
  for (const auto& e : map.entries()) loads.insert(e.grid_id);
  r.distinct_loads = loads.size();

  json manifest = {{"format", "absense-generate"},
                   {"seed", c.seed},
                   {"config", config_to_json(c)},
                   {"dataset", r.dataset_path.filename().string()},
                   {"function_map", r.function_map_path.filename().string()},
                   {"map_entries", r.map_entries},
                   {"distinct_loads", r.distinct_loads},
                   {"grid_points", grid.size()}};
  std::ofstream os(out_dir / "generate.json");
  if (!os) throw std::runtime_error("cannot write '" + (out_dir / "generate.json").string() + "'");
  os << manifest.dump(2) << '\n';
  return r;
}

RunReport cmd_run(const Config& config, const std::filesystem::path& out_dir) {
  const Inputs inputs = build_inputs(config);
  RunReport report = simulate(make_scenario(config, inputs));
  export_report(report, out_dir);
  return report;
}

std::vector<SweepRow> run_sweep(const Config& config, const Inputs& inputs) {
  struct Job {
    double eps;
    int cycles;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (double e : config.sweep.error_fractions)
    for (int c : config.sweep.cycles)
      for (int s = 0; s < config.sweep.seeds; ++s)
        jobs.push_back({e, c, config.seed + static_cast<std::uint64_t>(s)});

  std::vector<SweepRow> rows(jobs.size());
  std::atomic<std::size_t> next{0};
  std::mutex err_mu;
  std::exception_ptr first_error;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= jobs.size()) return;
      try {
        Config c = config;
        c.seed = jobs[i].seed;
        c.protocol.measurement_error_fraction = jobs[i].eps;
        c.protocol.max_cycles = jobs[i].cycles;
        const RunReport rep = simulate(make_scenario(c, inputs));
        const auto last = rep.estimates_at_cycle(jobs[i].cycles);
        rows[i] = {jobs[i].eps, jobs[i].cycles, jobs[i].seed, rep.accuracy(), spread(last).r_ohm};
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mu);
        if (!first_error) first_error = std::current_exception();
        next.store(jobs.size());
      }
    }
  };
  unsigned threads = config.sweep.threads > 0 ? static_cast<unsigned>(config.sweep.threads)
                                              : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(jobs.size(), 1)));
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);

  std::sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) {
    if (a.error_fraction != b.error_fraction) return a.error_fraction < b.error_fraction;
    if (a.cycles != b.cycles) return a.cycles < b.cycles;
    return a.seed < b.seed;
  });
  return rows;
}

std::vector<SweepCell> summarize_sweep(const std::vector<SweepRow>& rows) {
  std::vector<SweepCell> cells;
  std::size_t i = 0;
  while (i < rows.size()) {
    std::size_t j = i;
    SweepCell cell{rows[i].error_fraction, rows[i].cycles, 0.0, rows[i].accuracy, rows[i].accuracy};
    double sum = 0.0;
    while (j < rows.size() && rows[j].error_fraction == cell.error_fraction &&
           rows[j].cycles == cell.cycles) {
      sum += rows[j].accuracy;
      cell.min_accuracy = std::min(cell.min_accuracy, rows[j].accuracy);
      cell.max_accuracy = std::max(cell.max_accuracy, rows[j].accuracy);
      ++j;
    }
    cell.mean_accuracy = sum / static_cast<double>(j - i);
    cells.push_back(cell);
    i = j;
  }
  return cells;
}

std::vector<SweepCell> cmd_sweep_error(const Config& config, const std::filesystem::path& out_dir) {
  const Inputs inputs = build_inputs(config);
  const auto rows = run_sweep(config, inputs);
  const auto cells = summarize_sweep(rows);

  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory '" + out_dir.string() + "': " + ec.message());
  auto open = [](const std::filesystem::path& p) {
    std::ofstream os(p, std::ios::trunc);
    if (!os) throw std::runtime_error("cannot write '" + p.string() + "'");
    return os;
  };
  {
    auto os = open(out_dir / "sweep_runs.csv");
    os << "error_fraction,cycles,seed,accuracy,final_spread_r_ohm\n";
    for (const auto& r : rows)
      os << format_double(r.error_fraction) << ',' << r.cycles << ',' << r.seed << ','
         << format_double(r.accuracy) << ',' << format_double(r.final_spread_r_ohm) << '\n';
  }
  {
    auto os = open(out_dir / "sweep.csv");
    os << "error_fraction,cycles,mean_accuracy,min_accuracy,max_accuracy\n";
    for (const auto& c : cells)
      os << format_double(c.error_fraction) << ',' << c.cycles << ',' << format_double(c.mean_accuracy)
         << ',' << format_double(c.min_accuracy) << ',' << format_double(c.max_accuracy) << '\n';
  }
  {
    json table = json::array();
    for (const auto& c : cells)
      table.push_back({{"error_fraction", c.error_fraction},
                       {"cycles", c.cycles},
                       {"mean_accuracy", c.mean_accuracy},
                       {"min_accuracy", c.min_accuracy},
                       {"max_accuracy", c.max_accuracy}});
    json j = {{"format", "absense-sweep"},
              {"seed", config.seed},
              {"config", config_to_json(config)},
              {"function_id", config.function_id},
              {"runs", rows.size()},
              {"cells", table}};
    auto os = open(out_dir / "sweep.json");
    os << j.dump(2) << '\n';
  }
  return cells;
}

json error_record(const std::string& command, const std::exception& e) {
  json j = {{"status", "error"}, {"command", command}, {"message", e.what()}};
  if (const auto* ce = dynamic_cast<const ConfigError*>(&e)) {
    j["kind"] = "config";
    j["field"] = ce->field();
  } else if (dynamic_cast<const DatasetError*>(&e)) {
    j["kind"] = "dataset";
  } else if (dynamic_cast<const std::invalid_argument*>(&e)) {
    j["kind"] = "invalid_argument";
  } else {
    j["kind"] = "runtime";
  }
  return j;
}

}  // namespace absense
