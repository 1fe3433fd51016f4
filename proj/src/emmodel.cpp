#include "absense/emmodel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "absense/kernels.hpp"

namespace absense {

namespace {

double deg2rad(double deg) { return deg * kPi / 180.0; }

bool strictly_increasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i] > v[i - 1])) return false;
  return true;
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  if (n == 0) throw std::invalid_argument("grid axis needs at least one point");
  std::vector<double> out(n);
  if (n == 1) {
    out[0] = lo;
    return out;
  }
  const double step = (hi - lo) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) out[i] = lo + step * static_cast<double>(i);
  out[n - 1] = hi;
  return out;
}

struct SheetTable {
  std::vector<double> re;
  std::vector<double> im;
};

SheetTable sheet_table(const LoadGrid& grid, const SurfaceModel& model) {
  SheetTable t;
  t.re.resize(grid.size());
  t.im.resize(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const auto z = sheet_impedance(grid.load(k), model);
    t.re[k] = z.real();
    t.im[k] = z.imag();
  }
  return t;
}

double normalized_distance2(const LoadState& a, const LoadState& b, double r_span, double c_span) {
  const double dr = (a.resistance_ohm - b.resistance_ohm) / r_span;
  const double dc = (a.capacitance_farad - b.capacitance_farad) / c_span;
  return dr * dr + dc * dc;
}

}  // namespace

const char* to_string(Polarization p) { return p == Polarization::TE ? "TE" : "TM"; }

Polarization polarization_from_string(const std::string& s) {
  if (s == "TE") return Polarization::TE;
  if (s == "TM") return Polarization::TM;
  throw std::invalid_argument("unknown polarization '" + s + "' (expected TE or TM)");
}

void WaveAttributes::validate() const {
  if (!(azimuth_deg == 0.0 || azimuth_deg == 90.0))
    throw std::invalid_argument("azimuth_deg must be 0 or 90, got " + std::to_string(azimuth_deg));
  if (!(elevation_deg >= 0.0 && elevation_deg <= 75.0))
    throw std::invalid_argument("elevation_deg must lie in [0, 75], got " +
                                std::to_string(elevation_deg));
  if (!(incident_power_density > 0.0) || !std::isfinite(incident_power_density))
    throw std::invalid_argument("incident_power_density must be positive");
}

bool WaveAttributes::same_function(const WaveAttributes& other) const {
  return azimuth_deg == other.azimuth_deg && elevation_deg == other.elevation_deg &&
         polarization == other.polarization;
}

double LoadState::reactance_ohm(double omega) const { return -1.0 / (omega * capacitance_farad); }

LoadState LoadState::from_reactance(double resistance_ohm, double reactance_ohm, double omega) {
  LoadState s;
  s.resistance_ohm = resistance_ohm;
  s.capacitance_farad = reactance_ohm < 0.0 ? -1.0 / (omega * reactance_ohm)
                                            : std::numeric_limits<double>::infinity();
  return s;
}

SurfaceModel SurfaceModel::calibrated(double frequency_hz, double r0_ohm, double c0_farad,
                                      double cell_pitch_m) {
  if (!(frequency_hz > 0.0) || !(r0_ohm > 0.0) || !(c0_farad > 0.0) || !(cell_pitch_m > 0.0))
    throw std::invalid_argument("surface model parameters must be positive");
  SurfaceModel m;
  m.operating_frequency_hz = frequency_hz;
  m.cell_pitch_m = cell_pitch_m;
  m.calibration_resistance_ohm = r0_ohm;
  m.calibration_capacitance_farad = c0_farad;
  m.resistance_scale = m.free_space_impedance_ohm / r0_ohm;
  const double w0 = m.omega();
  m.effective_inductance_henry = 1.0 / (w0 * w0 * c0_farad);
  return m;
}

LoadGrid::LoadGrid(std::vector<double> resistance_ohm, std::vector<double> capacitance_farad)
    : resistances_(std::move(resistance_ohm)), capacitances_(std::move(capacitance_farad)) {
  if (resistances_.empty() || capacitances_.empty())
    throw std::invalid_argument("load grid axes must be non-empty");
  if (!strictly_increasing(resistances_) || !strictly_increasing(capacitances_))
    throw std::invalid_argument("load grid axis values must be strictly increasing");
  for (double r : resistances_)
    if (!(r >= 0.0) || !std::isfinite(r)) throw std::invalid_argument("grid resistance must be >= 0");
  for (double c : capacitances_)
    if (!(c > 0.0) || !std::isfinite(c)) throw std::invalid_argument("grid capacitance must be > 0");
}

LoadGrid LoadGrid::linear(double r_min, double r_max, std::size_t r_count, double c_min,
                          double c_max, std::size_t c_count) {
  return LoadGrid(linspace(r_min, r_max, r_count), linspace(c_min, c_max, c_count));
}

LoadGrid LoadGrid::default_grid() { return linear(0.35, 2.15, 10, 0.55e-12, 1.54e-12, 10); }

std::size_t LoadGrid::id(std::size_t r_index, std::size_t c_index) const {
  if (r_index >= resistances_.size() || c_index >= capacitances_.size())
    throw std::out_of_range("grid index out of range");
  return r_index * capacitances_.size() + c_index;
}

LoadState LoadGrid::load(std::size_t k) const {
  if (k >= size()) throw std::out_of_range("grid identifier out of range");
  const std::size_t nc = capacitances_.size();
  return LoadState{resistances_[k / nc], capacitances_[k % nc]};
}

double LoadGrid::resistance_span() const {
  const double s = resistances_.back() - resistances_.front();
  return s > 0.0 ? s : 1.0;
}

double LoadGrid::capacitance_span() const {
  const double s = capacitances_.back() - capacitances_.front();
  return s > 0.0 ? s : 1.0;
}

std::size_t LoadGrid::nearest(const LoadState& load) const {
  const double rs = resistance_span();
  const double cs = capacitance_span();
  // Separable metric: pick the nearest value on each axis independently.
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
  return id(nearest_on(resistances_, load.resistance_ohm, rs),
            nearest_on(capacitances_, load.capacitance_farad, cs));
}

FunctionMap::FunctionMap(LoadGrid grid, std::vector<FunctionMapEntry> entries)
    : grid_(std::move(grid)), entries_(std::move(entries)) {
  if (entries_.empty()) throw std::invalid_argument("function map must not be empty");
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (entries_[i].function_id != static_cast<int>(i))
      throw std::invalid_argument("function ids must be contiguous from 0; entry " +
                                  std::to_string(i) + " has id " +
                                  std::to_string(entries_[i].function_id));
    for (std::size_t j = 0; j < i; ++j)
      if (entries_[j].wave.same_function(entries_[i].wave))
        throw std::invalid_argument("duplicate wave in function map: entries " +
                                    std::to_string(j) + " and " + std::to_string(i));
  }
}

const FunctionMapEntry& FunctionMap::at(int function_id) const {
  if (function_id < 0 || static_cast<std::size_t>(function_id) >= entries_.size())
    throw std::out_of_range("function id " + std::to_string(function_id) + " not in map");
  return entries_[static_cast<std::size_t>(function_id)];
}

int FunctionMap::find(const WaveAttributes& wave) const {
  for (const auto& e : entries_)
    if (e.wave.same_function(wave)) return e.function_id;
  return -1;
}

bool PowerFlowDataset::uniform_across_nodes() const {
  for (std::size_t w = 0; w < waves.size(); ++w)
    for (std::size_t k = 0; k < grid.size(); ++k) {
      const double first = at(w, k, 0);
      for (std::size_t n = 1; n < node_count; ++n)
        if (at(w, k, n) != first) return false;
    }
  return true;
}

void PowerFlowDataset::validate() const {
  if (waves.empty()) throw std::invalid_argument("dataset has no waves");
  if (node_count == 0) throw std::invalid_argument("dataset node_count must be >= 1");
  if (power_w.size() != waves.size() * grid.size() * node_count)
    throw std::invalid_argument("dataset table has " + std::to_string(power_w.size()) +
                                " values, expected " +
                                std::to_string(waves.size() * grid.size() * node_count));
  for (std::size_t w = 0; w < waves.size(); ++w)
    for (std::size_t k = 0; k < grid.size(); ++k)
      for (std::size_t n = 0; n < node_count; ++n) {
        const double p = at(w, k, n);
        if (!std::isfinite(p) || p < 0.0)
          throw std::invalid_argument("invalid power at (wave " + std::to_string(w) + ", load " +
                                      std::to_string(k) + ", node " + std::to_string(n) + ")");
      }
}

double effective_wave_impedance(const WaveAttributes& wave, const SurfaceModel& model) {
  const double c = std::cos(deg2rad(wave.elevation_deg));
  return wave.polarization == Polarization::TE ? model.free_space_impedance_ohm / c
                                               : model.free_space_impedance_ohm * c;
}

std::complex<double> sheet_impedance(const LoadState& load, const SurfaceModel& model) {
  const double w = model.omega();
  const double k = model.resistance_scale;
  const double x = w * model.effective_inductance_henry - 1.0 / (w * load.capacitance_farad);
  return {k * load.resistance_ohm, k * x};
}

double absorption_coefficient(const WaveAttributes& wave, const LoadState& load,
                              const SurfaceModel& model) {
  const auto z = sheet_impedance(load, model);
  return kernels::scalar::absorption_one(effective_wave_impedance(wave, model), z.real(),
                                         z.imag());
}

std::vector<double> absorption_over_grid(const WaveAttributes& wave, const LoadGrid& grid,
                                         const SurfaceModel& model) {
  const auto table = sheet_table(grid, model);
  std::vector<double> out(grid.size());
  kernels::absorption_sweep(effective_wave_impedance(wave, model), table.re, table.im, out);
  return out;
}

ElementPowers dissipated_power_per_element(const WaveAttributes& wave, const LoadState& load,
                                           const SurfaceModel& model) {
  const double a = absorption_coefficient(wave, load, model);
  const double p = a * (wave.incident_power_density * std::cos(deg2rad(wave.elevation_deg)) *
                        model.cell_pitch_m * model.cell_pitch_m);
  // In the xz plane the TE field is along y; in the yz plane it is along x.
  const bool along_y = (wave.azimuth_deg == 0.0) == (wave.polarization == Polarization::TE);
  ElementPowers out;
  (along_y ? out.y_element_w : out.x_element_w) = p;
  return out;
}

double dissipated_power(const WaveAttributes& wave, const LoadState& load,
                        const SurfaceModel& model) {
  return dissipated_power_per_element(wave, load, model).total();
}

FunctionMap build_function_map(const std::vector<WaveAttributes>& waves, const LoadGrid& grid,
                               const SurfaceModel& model) {
  if (waves.empty()) throw std::invalid_argument("build_function_map: no waves given");
  for (std::size_t i = 0; i < waves.size(); ++i) {
    waves[i].validate();
    for (std::size_t j = 0; j < i; ++j)
      if (waves[i].same_function(waves[j]))
        throw std::invalid_argument("build_function_map: duplicate wave at positions " +
                                    std::to_string(j) + " and " + std::to_string(i));
  }

  const auto table = sheet_table(grid, model);
  std::vector<double> absorption(grid.size());
  std::vector<FunctionMapEntry> entries;
  entries.reserve(waves.size());
  for (std::size_t i = 0; i < waves.size(); ++i) {
    const double eta = effective_wave_impedance(waves[i], model);
    kernels::absorption_sweep(eta, table.re, table.im, absorption);
    const std::size_t best = kernels::argmax_first(absorption);

    for (std::size_t k = 0; k < grid.size(); ++k) {
      const double a = kernels::scalar::absorption_one(eta, table.re[k], table.im[k]);
      if (a > absorption[best] || (a == absorption[best] && k < best))
        throw std::logic_error("function map argmax disagrees with exhaustive scan");
    }
    entries.push_back(FunctionMapEntry{static_cast<int>(i), waves[i], grid.load(best), best});
  }
  return FunctionMap(grid, std::move(entries));
}

ReverseLookupResult reverse_lookup(const FunctionMap& map, const LoadState& estimate) {
  const double rs = map.grid().resistance_span();
  const double cs = map.grid().capacitance_span();
  const FunctionMapEntry* best = nullptr;
  double best_d = std::numeric_limits<double>::infinity();
  for (const auto& e : map.entries()) {
    const double d = normalized_distance2(e.load, estimate, rs, cs);
    if (d < best_d) {
      best_d = d;
      best = &e;
    }
  }
  if (best == nullptr) best = &map.entries().front();
  return {best->function_id, best->wave};
}

PowerFlowDataset synthesize_dataset(const std::vector<WaveAttributes>& waves, const LoadGrid& grid,
                                    const SurfaceModel& model, std::size_t node_count) {
  if (waves.empty()) throw std::invalid_argument("synthesize_dataset: no waves given");
  if (node_count == 0) throw std::invalid_argument("synthesize_dataset: node_count must be >= 1");
  PowerFlowDataset ds;
  ds.frequency_hz = model.operating_frequency_hz;
  ds.waves = waves;
  ds.grid = grid;
  ds.node_count = node_count;
  ds.source = DatasetSource::Analytical;
  ds.power_w.resize(waves.size() * grid.size() * node_count);

  for (std::size_t w = 0; w < waves.size(); ++w) {
    waves[w].validate();
    const auto a = absorption_over_grid(waves[w], grid, model);
    const double scale = waves[w].incident_power_density *
                         std::cos(deg2rad(waves[w].elevation_deg)) * model.cell_pitch_m *
                         model.cell_pitch_m;
    for (std::size_t k = 0; k < grid.size(); ++k) {
      const double p = a[k] * scale;
      std::fill_n(ds.power_w.begin() + static_cast<std::ptrdiff_t>(ds.index(w, k, 0)),
                  node_count, p);
    }
  }
  return ds;
}

std::vector<WaveAttributes> default_wave_set(double incident_power_density) {
  std::vector<WaveAttributes> waves;
  for (Polarization pol : {Polarization::TE, Polarization::TM})
    for (int theta = 0; theta <= 75; theta += 5)
      waves.push_back(WaveAttributes{0.0, static_cast<double>(theta), pol, incident_power_density});
  return waves;
}

}  // namespace absense
