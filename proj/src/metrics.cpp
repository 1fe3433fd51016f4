#include "absense/metrics.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <system_error>

#include "absense/dataset_io.hpp"
#include "json.hpp"

namespace absense {

using nlohmann::json;

bool NodeOutcome::operator==(const NodeOutcome& o) const {
  return function_id == o.function_id && wave.azimuth_deg == o.wave.azimuth_deg &&
         wave.elevation_deg == o.wave.elevation_deg && wave.polarization == o.wave.polarization &&
         wave.incident_power_density == o.wave.incident_power_density && r_ohm == o.r_ohm &&
         x_ohm == o.x_ohm && measured_load_id == o.measured_load_id;
}

void RunReport::reset(std::size_t node_count) {
  counters.assign(node_count, {});
  outcomes.assign(node_count, {});
  trace.clear();
  phases = {};
  events_dispatched = 0;
}

void RunReport::record_reception(std::size_t receiver, Reception status) {
  NodeCounters& c = counters.at(receiver);
  switch (status) {
    case Reception::Decoded: ++c.received; break;
    case Reception::LostCollision: ++c.lost_collision; break;
    case Reception::LostHalfDuplex: ++c.lost_half_duplex; break;
    case Reception::LostRange: ++c.lost_range; break;
  }
}

double RunReport::accuracy() const {
  if (outcomes.empty()) return 0.0;
  std::size_t hits = 0;
  for (const auto& o : outcomes)
    if (o.function_id == true_function_id) ++hits;
  return static_cast<double>(hits) / static_cast<double>(outcomes.size());
}

std::vector<Estimate> RunReport::estimates_at_cycle(int cycle) const {
  std::vector<Estimate> out(node_count());
  std::vector<bool> seen(node_count(), false);
  for (const auto& s : trace)
    if (s.cycle == cycle && s.node < out.size()) {
      out[s.node] = {s.r_ohm, s.x_ohm};
      seen[s.node] = true;
    }
  for (bool b : seen)
    if (!b) throw std::out_of_range("trace has no sample for cycle " + std::to_string(cycle));
  return out;
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::uint64_t parse_u64(const std::string& s) {
  std::size_t pos = 0;
  const auto v = std::stoull(s, &pos);
  if (pos != s.size()) throw std::invalid_argument("bad integer '" + s + "'");
  return v;
}

int parse_int(const std::string& s) {
  std::size_t pos = 0;
  const int v = std::stoi(s, &pos);
  if (pos != s.size()) throw std::invalid_argument("bad integer '" + s + "'");
  return v;
}

template <typename RowFn>
void read_table(std::istream& is, const std::string& expected_header, RowFn&& on_row) {
  std::string line;
  if (!std::getline(is, line) || line != expected_header)
    throw std::invalid_argument("unexpected CSV header: '" + line + "'");
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      on_row(split_csv(line));
    } catch (const std::exception& e) {
      throw std::invalid_argument("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
}

constexpr const char* kTraceHeader = "time_s,node,cycle,r_ohm,x_ohm,f_id";
constexpr const char* kNodesHeader =
    "node,sent,received,lost_collision,lost_half_duplex,lost_range,f_id,azimuth_deg,"
    "elevation_deg,polarization,incident_power_density,r_ohm,x_ohm,measured_load_id";

std::ofstream open_for_write(const std::filesystem::path& p) {
  std::ofstream os(p, std::ios::binary | std::ios::trunc);
  if (!os) {
    const std::error_code ec(errno, std::generic_category());
    throw std::runtime_error("cannot write '" + p.string() + "': " + ec.message());
  }
  return os;
}

std::ifstream open_for_read(const std::filesystem::path& p) {
  std::ifstream is(p, std::ios::binary);
  if (!is) throw std::runtime_error("cannot read '" + p.string() + "'");
  return is;
}

}  // namespace

void write_trace_csv(const RunReport& report, std::ostream& os) {
  os << kTraceHeader << '\n';
  for (const auto& s : report.trace)
    os << format_double(s.time_s) << ',' << s.node << ',' << s.cycle << ','
       << format_double(s.r_ohm) << ',' << format_double(s.x_ohm) << ',' << s.f_id << '\n';
}

std::vector<TraceSample> read_trace_csv(std::istream& is) {
  std::vector<TraceSample> out;
  read_table(is, kTraceHeader, [&](const std::vector<std::string>& f) {
    if (f.size() != 6) throw std::invalid_argument("expected 6 fields");
    out.push_back({parse_double(f[0]), static_cast<std::size_t>(parse_u64(f[1])), parse_int(f[2]),
                   parse_double(f[3]), parse_double(f[4]), parse_int(f[5])});
  });
  return out;
}

void write_nodes_csv(const RunReport& report, std::ostream& os) {
  os << kNodesHeader << '\n';
  for (std::size_t i = 0; i < report.node_count(); ++i) {
    const auto& c = report.counters[i];
    const auto& o = report.outcomes.at(i);
    os << i << ',' << c.sent << ',' << c.received << ',' << c.lost_collision << ','
       << c.lost_half_duplex << ',' << c.lost_range << ',' << o.function_id << ','
       << format_double(o.wave.azimuth_deg) << ',' << format_double(o.wave.elevation_deg) << ','
       << to_string(o.wave.polarization) << ',' << format_double(o.wave.incident_power_density)
       << ',' << format_double(o.r_ohm) << ',' << format_double(o.x_ohm) << ','
       << o.measured_load_id << '\n';
  }
}

void read_nodes_csv(std::istream& is, RunReport& report) {
  std::vector<NodeCounters> counters;
  std::vector<NodeOutcome> outcomes;
  read_table(is, kNodesHeader, [&](const std::vector<std::string>& f) {
    if (f.size() != 14) throw std::invalid_argument("expected 14 fields");
    if (parse_u64(f[0]) != counters.size()) throw std::invalid_argument("node rows out of order");
    counters.push_back({parse_u64(f[1]), parse_u64(f[2]), parse_u64(f[3]), parse_u64(f[4]),
                        parse_u64(f[5])});
    NodeOutcome o;
    o.function_id = parse_int(f[6]);
    o.wave.azimuth_deg = parse_double(f[7]);
    o.wave.elevation_deg = parse_double(f[8]);
    o.wave.polarization = polarization_from_string(f[9]);
    o.wave.incident_power_density = parse_double(f[10]);
    o.r_ohm = parse_double(f[11]);
    o.x_ohm = parse_double(f[12]);
    o.measured_load_id = static_cast<std::size_t>(parse_u64(f[13]));
    outcomes.push_back(o);
  });
  report.counters = std::move(counters);
  report.outcomes = std::move(outcomes);
}

void write_summary_json(const RunReport& report, std::ostream& os) {
  NodeCounters total;
  for (const auto& c : report.counters) {
    total.sent += c.sent;
    total.received += c.received;
    total.lost_collision += c.lost_collision;
    total.lost_half_duplex += c.lost_half_duplex;
    total.lost_range += c.lost_range;
  }
  json j;
  j["format"] = "absense-run-summary";
  j["version"] = 1;
  j["seed"] = report.seed;
  j["config"] = json::parse(report.config_json);
  j["node_count"] = report.node_count();
  j["max_cycles"] = report.max_cycles;
  j["true_function_id"] = report.true_function_id;
  j["accuracy"] = report.accuracy();
  j["phases"] = {{"measurement_s", report.phases.measurement_s},
                 {"consensus_s", report.phases.consensus_s},
                 {"final_time_s", report.phases.final_time_s}};
  j["events_dispatched"] = report.events_dispatched;
  j["packets"] = {{"sent", total.sent},
                  {"received", total.received},
                  {"lost_collision", total.lost_collision},
                  {"lost_half_duplex", total.lost_half_duplex},
                  {"lost_range", total.lost_range}};
  os << j.dump(2) << '\n';
}

void read_summary_json(std::istream& is, RunReport& report) {
  const json j = json::parse(is);
  if (j.value("format", "") != "absense-run-summary")
    throw std::invalid_argument("not a run summary document");
  report.seed = j.at("seed").get<std::uint64_t>();
  report.config_json = j.at("config").dump();
  report.max_cycles = j.at("max_cycles").get<int>();
  report.true_function_id = j.at("true_function_id").get<int>();
  report.phases.measurement_s = j.at("phases").at("measurement_s").get<double>();
  report.phases.consensus_s = j.at("phases").at("consensus_s").get<double>();
  report.phases.final_time_s = j.at("phases").at("final_time_s").get<double>();
  report.events_dispatched = j.at("events_dispatched").get<std::uint64_t>();
}

ExportPaths export_report(const RunReport& report, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory '" + dir.string() + "': " + ec.message());
  ExportPaths paths{dir / "trace.csv", dir / "nodes.csv", dir / "summary.json"};
  auto emit = [](const std::filesystem::path& p, auto&& writer) {
    auto os = open_for_write(p);
    writer(os);
    os.flush();
    if (!os) throw std::runtime_error("write failed for '" + p.string() + "'");
  };
  emit(paths.trace_csv, [&](std::ostream& os) { write_trace_csv(report, os); });
  emit(paths.nodes_csv, [&](std::ostream& os) { write_nodes_csv(report, os); });
  emit(paths.summary_json, [&](std::ostream& os) { write_summary_json(report, os); });
  return paths;
}

RunReport import_report(const std::filesystem::path& dir) {
  RunReport r;
  {
    auto is = open_for_read(dir / "summary.json");
    read_summary_json(is, r);
  }
  {
    auto is = open_for_read(dir / "nodes.csv");
    read_nodes_csv(is, r);
  }
  {
    auto is = open_for_read(dir / "trace.csv");
    r.trace = read_trace_csv(is);
  }
  return r;
}

}  // namespace absense
