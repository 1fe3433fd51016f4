#include "absense/dataset_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <vector>

namespace absense {

namespace {

constexpr const char* kPowerHeader = "wave_index,load_index,node_index,power_w";
constexpr const char* kMapHeader = "function_id,wave_index,load_index,resistance_ohm,capacitance_farad";

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  return out;
}

std::vector<std::string> split_ws(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

std::size_t parse_index(const std::string& token) {
  std::size_t v = 0;
  const auto* first = token.data();
  const auto* last = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || token.empty())
    throw std::invalid_argument("not a non-negative integer: '" + token + "'");
  return v;
}

struct Header {
  std::map<std::string, std::string> fields;
  std::vector<WaveAttributes> waves;
  LoadGrid grid;
};

class Reader {
public:
  Reader(std::istream& is, std::string origin) : is_(is), origin_(std::move(origin)) {}

  [[noreturn]] void fail(const std::string& what) const {
    throw DatasetError(origin_ + ":" + std::to_string(line_no_) + ": " + what);
  }

  bool next(std::string& line) {
    while (std::getline(is_, line)) {
      ++line_no_;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty() || line[0] == '#') continue;
      return true;
    }
    return false;
  }

  Header read_header(const std::string& expected_kind) {
    Header h;
    std::string line;
    std::map<std::size_t, WaveAttributes> waves;
    bool in_records = false;
    while (next(line)) {
      if (line == "begin_records") {
        in_records = true;
        break;
      }
      const auto sp = line.find(' ');
      const std::string key = line.substr(0, sp);
      const std::string value = sp == std::string::npos ? "" : line.substr(sp + 1);
      if (key == "wave") {
        auto parsed = parse_wave(value);
        if (!waves.emplace(parsed).second)
          fail("duplicate wave index " + std::to_string(parsed.first));
        continue;
      }
      if (h.fields.count(key)) fail("duplicate header field '" + key + "'");
      h.fields[key] = value;
    }
    if (!in_records) fail("missing begin_records");
    if (field(h, "format") != "absense-dataset") fail("unknown format '" + field(h, "format") + "'");
    if (field(h, "version") != "1") fail("unsupported version '" + field(h, "version") + "'");
    if (field(h, "kind") != expected_kind)
      fail("expected kind '" + expected_kind + "', found '" + field(h, "kind") + "'");

    const std::size_t wave_count = to_index(field(h, "wave_count"), "wave_count");
    if (waves.size() != wave_count)
      fail("wave_count is " + std::to_string(wave_count) + " but " +
           std::to_string(waves.size()) + " wave lines were given");
    for (std::size_t i = 0; i < wave_count; ++i) {
      auto it = waves.find(i);
      if (it == waves.end()) fail("wave " + std::to_string(i) + " missing");
      h.waves.push_back(it->second);
    }

    try {
      h.grid = LoadGrid(numbers(field(h, "resistance_ohm"), "resistance_ohm"),
                        numbers(field(h, "capacitance_farad"), "capacitance_farad"));
    } catch (const std::invalid_argument& e) {
      fail(std::string("bad grid axes: ") + e.what());
    }
    return h;
  }

  std::string field(const Header& h, const std::string& key) {
    auto it = h.fields.find(key);
    if (it == h.fields.end()) fail("missing header field '" + key + "'");
    return it->second;
  }

  std::size_t to_index(const std::string& s, const std::string& what) {
    try {
      return parse_index(s);
    } catch (const std::invalid_argument&) {
      fail("field '" + what + "' is not a non-negative integer: '" + s + "'");
    }
  }

  double to_double(const std::string& s, const std::string& what) {
    try {
      return parse_double(s);
    } catch (const std::invalid_argument&) {
      fail("field '" + what + "' is not a number: '" + s + "'");
    }
  }

  std::vector<double> numbers(const std::string& s, const std::string& what) {
    std::vector<double> out;
    for (const auto& tok : split_ws(s)) out.push_back(to_double(tok, what));
    return out;
  }

  std::pair<std::size_t, WaveAttributes> parse_wave(const std::string& value) {
    const auto toks = split_ws(value);
    if (toks.empty()) fail("empty wave line");
    const std::size_t idx = to_index(toks[0], "wave index");
    WaveAttributes w;
    bool seen[4] = {false, false, false, false};
    for (std::size_t i = 1; i < toks.size(); ++i) {
      const auto eq = toks[i].find('=');
      if (eq == std::string::npos) fail("wave attribute without '=': '" + toks[i] + "'");
      const auto k = toks[i].substr(0, eq);
      const auto v = toks[i].substr(eq + 1);
      if (k == "azimuth_deg") {
        w.azimuth_deg = to_double(v, k);
        seen[0] = true;
      } else if (k == "elevation_deg") {
        w.elevation_deg = to_double(v, k);
        seen[1] = true;
      } else if (k == "polarization") {
        try {
          w.polarization = polarization_from_string(v);
        } catch (const std::invalid_argument& e) {
          fail(e.what());
        }
        seen[2] = true;
      } else if (k == "incident_power_density") {
        w.incident_power_density = to_double(v, k);
        seen[3] = true;
      } else {
        fail("unknown wave attribute '" + k + "'");
      }
    }
    if (!(seen[0] && seen[1] && seen[2] && seen[3]))
      fail("wave " + std::to_string(idx) + " is missing attributes");
    try {
      w.validate();
    } catch (const std::invalid_argument& e) {
      fail("wave " + std::to_string(idx) + ": " + e.what());
    }
    return {idx, w};
  }

  void expect_record_header(const char* expected) {
    std::string line;
    if (!next(line)) fail("missing record header row");
    if (line != expected) fail(std::string("record header must be '") + expected + "'");
  }

  std::size_t line_no() const { return line_no_; }

private:
  std::istream& is_;
  std::string origin_;
  std::size_t line_no_ = 0;
};

void write_waves_and_grid(std::ostream& os, double frequency_hz, const LoadGrid& grid,
                          const std::vector<WaveAttributes>& waves) {
  os << "frequency_hz " << format_double(frequency_hz) << '\n';
  os << "resistance_ohm";
  for (double r : grid.resistances()) os << ' ' << format_double(r);
  os << "\ncapacitance_farad";
  for (double c : grid.capacitances()) os << ' ' << format_double(c);
  os << "\nwave_count " << waves.size() << '\n';
  for (std::size_t i = 0; i < waves.size(); ++i) {
    const auto& w = waves[i];
    os << "wave " << i << " azimuth_deg=" << format_double(w.azimuth_deg)
       << " elevation_deg=" << format_double(w.elevation_deg)
       << " polarization=" << to_string(w.polarization)
       << " incident_power_density=" << format_double(w.incident_power_density) << '\n';
  }
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw DatasetError("cannot open '" + path.string() + "' for writing");
  return os;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DatasetError("cannot open '" + path.string() + "' for reading");
  return is;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) throw std::runtime_error("format_double failed");
  return std::string(buf, ptr);
}

double parse_double(const std::string& token) {
  double v = 0.0;
  const char* first = token.data();
  const char* last = token.data() + token.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || token.empty())
    throw std::invalid_argument("not a number: '" + token + "'");
  return v;
}

void write_dataset(const PowerFlowDataset& ds, std::ostream& os) {
  ds.validate();
  os << "# ABSense power-flow dataset\n";
  os << "format absense-dataset\nversion 1\nkind power_flow\n";
  os << "source " << (ds.source == DatasetSource::Analytical ? "analytical" : "imported") << '\n';
  os << "node_count " << ds.node_count << '\n';
  write_waves_and_grid(os, ds.frequency_hz, ds.grid, ds.waves);
  os << "begin_records\n" << kPowerHeader << '\n';
  const bool uniform = ds.uniform_across_nodes();
  for (std::size_t w = 0; w < ds.waves.size(); ++w)
    for (std::size_t k = 0; k < ds.grid.size(); ++k) {
      if (uniform) {
        os << w << ',' << k << ",*," << format_double(ds.at(w, k, 0)) << '\n';
      } else {
        for (std::size_t n = 0; n < ds.node_count; ++n)
          os << w << ',' << k << ',' << n << ',' << format_double(ds.at(w, k, n)) << '\n';
      }
    }
  os << "end_records\n";
}

PowerFlowDataset read_dataset(std::istream& is, const std::string& origin) {
  Reader rd(is, origin);
  Header h = rd.read_header("power_flow");

  PowerFlowDataset ds;
  ds.waves = h.waves;
  ds.grid = h.grid;
  ds.frequency_hz = rd.to_double(rd.field(h, "frequency_hz"), "frequency_hz");
  ds.node_count = rd.to_index(rd.field(h, "node_count"), "node_count");
  if (ds.node_count == 0) rd.fail("node_count must be >= 1");
  const auto src = rd.field(h, "source");
  if (src == "analytical")
    ds.source = DatasetSource::Analytical;
  else if (src == "imported")
    ds.source = DatasetSource::Imported;
  else
    rd.fail("unknown source '" + src + "'");

  const std::size_t total = ds.waves.size() * ds.grid.size() * ds.node_count;
  ds.power_w.assign(total, 0.0);
  std::vector<std::uint8_t> seen(total, 0);

  rd.expect_record_header(kPowerHeader);
  std::string line;
  bool closed = false;
  while (rd.next(line)) {
    if (line == "end_records") {
      closed = true;
      break;
    }
    const auto cols = split(line, ',');
    if (cols.size() != 4) rd.fail("record must have 4 columns: '" + line + "'");
    const std::size_t w = rd.to_index(cols[0], "wave_index");
    const std::size_t k = rd.to_index(cols[1], "load_index");
    const std::string coord = "(wave " + cols[0] + ", load " + cols[1] + ", node " + cols[2] + ")";
    if (w >= ds.waves.size()) rd.fail("wave_index out of range at " + coord);
    if (k >= ds.grid.size()) rd.fail("load_index out of range at " + coord);
    const double p = rd.to_double(cols[3], "power_w");
    if (!std::isfinite(p)) rd.fail("non-finite power at " + coord);
    if (p < 0.0) rd.fail("negative power at " + coord);

    std::size_t n_begin = 0;
    std::size_t n_end = ds.node_count;
    if (cols[2] != "*") {
      n_begin = rd.to_index(cols[2], "node_index");
      if (n_begin >= ds.node_count) rd.fail("node_index out of range at " + coord);
      n_end = n_begin + 1;
    }
    for (std::size_t n = n_begin; n < n_end; ++n) {
      const std::size_t i = ds.index(w, k, n);
      if (seen[i]) rd.fail("duplicate record at " + coord);
      seen[i] = 1;
      ds.power_w[i] = p;
    }
  }
  if (!closed) rd.fail("missing end_records");
  for (std::size_t w = 0; w < ds.waves.size(); ++w)
    for (std::size_t k = 0; k < ds.grid.size(); ++k)
      for (std::size_t n = 0; n < ds.node_count; ++n)
        if (!seen[ds.index(w, k, n)])
          rd.fail("no record for (wave " + std::to_string(w) + ", load " + std::to_string(k) +
                  ", node " + std::to_string(n) + ")");
  return ds;
}

void save_dataset(const PowerFlowDataset& ds, const std::filesystem::path& path) {
  auto os = open_out(path);
  write_dataset(ds, os);
  if (!os) throw DatasetError("write failed for '" + path.string() + "'");
}

PowerFlowDataset load_dataset(const std::filesystem::path& path) {
  auto is = open_in(path);
  return read_dataset(is, path.string());
}

void write_function_map(const FunctionMap& map, double frequency_hz, std::ostream& os) {
  std::vector<WaveAttributes> waves;
  for (const auto& e : map.entries()) waves.push_back(e.wave);
  os << "# ABSense function map\n";
  os << "format absense-dataset\nversion 1\nkind function_map\n";
  write_waves_and_grid(os, frequency_hz, map.grid(), waves);
  os << "begin_records\n" << kMapHeader << '\n';
  for (std::size_t i = 0; i < map.size(); ++i) {
    const auto& e = map.entries()[i];
    os << e.function_id << ',' << i << ',' << e.grid_id << ','
       << format_double(e.load.resistance_ohm) << ',' << format_double(e.load.capacitance_farad)
       << '\n';
  }
  os << "end_records\n";
}

FunctionMap read_function_map(std::istream& is, const std::string& origin) {
  Reader rd(is, origin);
  Header h = rd.read_header("function_map");
  rd.to_double(rd.field(h, "frequency_hz"), "frequency_hz");

  std::vector<std::optional<FunctionMapEntry>> slots(h.waves.size());
  rd.expect_record_header(kMapHeader);
  std::string line;
  bool closed = false;
  while (rd.next(line)) {
    if (line == "end_records") {
      closed = true;
      break;
    }
    const auto cols = split(line, ',');
    if (cols.size() != 5) rd.fail("record must have 5 columns: '" + line + "'");
    const std::size_t id = rd.to_index(cols[0], "function_id");
    const std::size_t w = rd.to_index(cols[1], "wave_index");
    const std::size_t k = rd.to_index(cols[2], "load_index");
    if (id >= slots.size()) rd.fail("function_id " + cols[0] + " out of range");
    if (w >= h.waves.size()) rd.fail("wave_index " + cols[1] + " out of range");
    if (k >= h.grid.size()) rd.fail("load_index " + cols[2] + " out of range");
    if (slots[id]) rd.fail("duplicate function_id " + cols[0]);
    LoadState load{rd.to_double(cols[3], "resistance_ohm"), rd.to_double(cols[4], "capacitance_farad")};
    if (!(load.capacitance_farad > 0.0) || !(load.resistance_ohm >= 0.0))
      rd.fail("invalid load for function_id " + cols[0]);
    slots[id] = FunctionMapEntry{static_cast<int>(id), h.waves[w], load, k};
  }
  if (!closed) rd.fail("missing end_records");
  std::vector<FunctionMapEntry> entries;
  for (std::size_t i = 0; i < slots.size(); ++i) {
    if (!slots[i]) rd.fail("no record for function_id " + std::to_string(i));
    entries.push_back(*slots[i]);
  }
  try {
    return FunctionMap(h.grid, std::move(entries));
  } catch (const std::invalid_argument& e) {
    rd.fail(e.what());
  }
}

void save_function_map(const FunctionMap& map, double frequency_hz,
                       const std::filesystem::path& path) {
  auto os = open_out(path);
  write_function_map(map, frequency_hz, os);
  if (!os) throw DatasetError("write failed for '" + path.string() + "'");
}

FunctionMap load_function_map(const std::filesystem::path& path) {
  auto is = open_in(path);
  return read_function_map(is, path.string());
}

}  // namespace absense
