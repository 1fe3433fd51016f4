#pragma once

// Analytical impedance-matching model of the absorbing metasurface, the
// manufacturer function map built on top of it, and per-element power-flow
// datasets (synthesised here or imported from an external field solver).

#include <complex>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace absense {

inline constexpr double kFreeSpaceImpedanceOhm = 376.730313668;
inline constexpr double kPi = 3.14159265358979323846;

enum class Polarization : std::uint8_t { TE, TM };

const char* to_string(Polarization p);
Polarization polarization_from_string(const std::string& s);

struct WaveAttributes {
  double azimuth_deg = 0.0;    // 0 or 90 (principal planes)
  double elevation_deg = 0.0;  // [0, 75]
  Polarization polarization = Polarization::TE;
  double incident_power_density = 1.0;  // W/m^2

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;

  /// Same direction and polarization, i.e. the same sensing outcome.
  bool same_function(const WaveAttributes& other) const;
};

struct LoadState {
  double resistance_ohm = 0.0;
  double capacitance_farad = 1e-12;

  /// X = -1/(omega C).
  double reactance_ohm(double omega) const;
  static LoadState from_reactance(double resistance_ohm, double reactance_ohm, double omega);
};

/// Unit-cell geometry, kept as metadata only.
struct CellGeometry {
  double patch_width_m = 4.5e-3;
  double gap_m = 0.5e-3;
  double metal_thickness_m = 0.02e-3;
  double dielectric_thickness_m = 0.5e-3;
  double relative_permittivity = 2.2;
  double conductivity_s_per_m = 5.8e7;
};

struct SurfaceModel {
  double operating_frequency_hz = 5e9;
  double free_space_impedance_ohm = kFreeSpaceImpedanceOhm;
  double resistance_scale = 0.0;            // k_R = eta0 / R0
  double effective_inductance_henry = 0.0;  // L0' = 1 / (omega0^2 C0)
  double cell_pitch_m = 0.010;
  double calibration_resistance_ohm = 1.15;
  double calibration_capacitance_farad = 0.99e-12;
  CellGeometry geometry;

  /// Model whose calibration load is resonant and matched at normal incidence.
  static SurfaceModel calibrated(double frequency_hz = 5e9, double r0_ohm = 1.15,
                                 double c0_farad = 0.99e-12, double cell_pitch_m = 0.010);

  double omega() const { return 2.0 * kPi * operating_frequency_hz; }
};

/// Discrete actuation states. Identifier k = r_index * |C| + c_index.
class LoadGrid {
public:
  LoadGrid() = default;
  LoadGrid(std::vector<double> resistance_ohm, std::vector<double> capacitance_farad);

  static LoadGrid linear(double r_min, double r_max, std::size_t r_count, double c_min,
                         double c_max, std::size_t c_count);
  /// 10x10 grid with the calibration load (1.15 ohm, 0.99 pF) at (4, 4).
  static LoadGrid default_grid();

  std::size_t size() const { return resistances_.size() * capacitances_.size(); }
  std::size_t id(std::size_t r_index, std::size_t c_index) const;
  LoadState load(std::size_t k) const;

  const std::vector<double>& resistances() const { return resistances_; }
  const std::vector<double>& capacitances() const { return capacitances_; }

  /// Axis spans used to normalise distances; a degenerate axis spans 1.
  double resistance_span() const;
  double capacitance_span() const;

  /// Nearest grid point in span-normalised (R, C) space; ties to lowest k.
  std::size_t nearest(const LoadState& load) const;

  bool operator==(const LoadGrid&) const = default;

private:
  std::vector<double> resistances_;
  std::vector<double> capacitances_;
};

struct FunctionMapEntry {
  int function_id = 0;
  WaveAttributes wave;
  LoadState load;
  std::size_t grid_id = 0;
};

/// Read-only map: function id -> load achieving full absorption of its wave.
class FunctionMap {
public:
  FunctionMap(LoadGrid grid, std::vector<FunctionMapEntry> entries);

  const LoadGrid& grid() const { return grid_; }
  const std::vector<FunctionMapEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  const FunctionMapEntry& at(int function_id) const;

  /// Function id whose wave matches `wave` by direction and polarization, or -1.
  int find(const WaveAttributes& wave) const;

private:
  LoadGrid grid_;
  std::vector<FunctionMapEntry> entries_;
};

struct ReverseLookupResult {
  int function_id = 0;
  WaveAttributes wave;
};

enum class DatasetSource : std::uint8_t { Analytical, Imported };

struct PowerFlowDataset {
  double frequency_hz = 5e9;
  std::vector<WaveAttributes> waves;
  LoadGrid grid;
  std::size_t node_count = 0;
  DatasetSource source = DatasetSource::Analytical;
  std::vector<double> power_w;  // [wave][load][node]

  std::size_t index(std::size_t wave, std::size_t load, std::size_t node) const {
    return (wave * grid.size() + load) * node_count + node;
  }
  double at(std::size_t wave, std::size_t load, std::size_t node) const {
    return power_w[index(wave, load, node)];
  }
  /// True if every (wave, load) row is identical across nodes.
  bool uniform_across_nodes() const;
  /// Checks dimensions and that every value is finite and non-negative.
  void validate() const;
};

/// Co-polarised and cross-polarised lumped-element powers of one unit cell.
struct ElementPowers {
  double x_element_w = 0.0;
  double y_element_w = 0.0;
  double total() const { return x_element_w + y_element_w; }
};

/// eta0/cos(theta) for TE, eta0*cos(theta) for TM.
double effective_wave_impedance(const WaveAttributes& wave, const SurfaceModel& model);

std::complex<double> sheet_impedance(const LoadState& load, const SurfaceModel& model);

double absorption_coefficient(const WaveAttributes& wave, const LoadState& load,
                              const SurfaceModel& model);

/// Absorption for every grid point, in grid-identifier order.
std::vector<double> absorption_over_grid(const WaveAttributes& wave, const LoadGrid& grid,
                                         const SurfaceModel& model);

ElementPowers dissipated_power_per_element(const WaveAttributes& wave, const LoadState& load,
                                           const SurfaceModel& model);

/// Power on the element aligned with the incident E-field.
double dissipated_power(const WaveAttributes& wave, const LoadState& load,
                        const SurfaceModel& model);

/// Throws std::invalid_argument on empty input or duplicate waves.
FunctionMap build_function_map(const std::vector<WaveAttributes>& waves, const LoadGrid& grid,
                               const SurfaceModel& model);

ReverseLookupResult reverse_lookup(const FunctionMap& map, const LoadState& estimate);

PowerFlowDataset synthesize_dataset(const std::vector<WaveAttributes>& waves, const LoadGrid& grid,
                                    const SurfaceModel& model, std::size_t node_count);

/// theta in {0,5,...,75} deg, phi = 0, TE block followed by TM block.
std::vector<WaveAttributes> default_wave_set(double incident_power_density = 1.0);

}  // namespace absense
