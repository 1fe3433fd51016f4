#include <stdexcept>
#include <cmath>
#include <complex>
#include <set>

#include "absense/emmodel.hpp"
#include "absense/kernels.hpp"
#include "doctest.h"

using namespace absense;

namespace {

// Independent re-derivation of the surface model: resonant RLC sheet scaled
// so that (R0, C0) matches free space at normal incidence.
double oracle_absorption(double theta_deg, bool te, double r, double c) {
  const double eta0 = 376.730313668;
  const double w0 = 2.0 * 3.14159265358979323846 * 5e9;
  const double l = 1.0 / (w0 * w0 * 0.99e-12);
  const double k = eta0 / 1.15;
  const std::complex<double> zs(k * r, k * (w0 * l - 1.0 / (w0 * c)));
  const double ct = std::cos(theta_deg * 3.14159265358979323846 / 180.0);
  const double eta = te ? eta0 / ct : eta0 * ct;
  const std::complex<double> gamma = (zs - eta) / (zs + eta);
  return std::clamp(1.0 - std::norm(gamma), 0.0, 1.0);
}

}  // namespace

TEST_SUITE("emmodel") {
  TEST_CASE("calibration load is matched at normal incidence for both polarizations") {
    const auto m = SurfaceModel::calibrated();
    const LoadState cal{1.15, 0.99e-12};
    for (auto p : {Polarization::TE, Polarization::TM}) {
      WaveAttributes w{0.0, 0.0, p, 1.0};
      CHECK(absorption_coefficient(w, cal, m) >= 0.999);
    }
    const auto z = sheet_impedance(cal, m);
    CHECK(z.real() == doctest::Approx(kFreeSpaceImpedanceOhm).epsilon(1e-12));
    CHECK(std::abs(z.imag()) < 1e-6);
  }

  TEST_CASE("effective wave impedance by polarization") {
    const auto m = SurfaceModel::calibrated();
    WaveAttributes te{0.0, 60.0, Polarization::TE, 1.0};
    WaveAttributes tm{0.0, 60.0, Polarization::TM, 1.0};
    CHECK(effective_wave_impedance(te, m) == doctest::Approx(2.0 * kFreeSpaceImpedanceOhm));
    CHECK(effective_wave_impedance(tm, m) == doctest::Approx(0.5 * kFreeSpaceImpedanceOhm));
  }

  TEST_CASE("absorption matches the independent oracle over the default grid") {
    const auto m = SurfaceModel::calibrated();
    const auto grid = LoadGrid::default_grid();
    for (const auto& w : default_wave_set()) {
      const auto a = absorption_over_grid(w, grid, m);
      for (std::size_t k = 0; k < grid.size(); ++k) {
        const auto l = grid.load(k);
        REQUIRE(a[k] == doctest::Approx(oracle_absorption(w.elevation_deg,
                                                         w.polarization == Polarization::TE,
                                                         l.resistance_ohm, l.capacitance_farad))
                            .epsilon(1e-12));
        REQUIRE(a[k] >= 0.0);
        REQUIRE(a[k] <= 1.0);
      }
    }
  }

  TEST_CASE("grid layout and identifiers") {
    const auto g = LoadGrid::default_grid();
    CHECK(g.size() == 100);
    CHECK(g.id(4, 4) == 44);
    CHECK(g.load(44).resistance_ohm == doctest::Approx(1.15));
    CHECK(g.load(44).capacitance_farad == doctest::Approx(0.99e-12));
    CHECK(g.resistances().back() == 2.15);
    CHECK_THROWS_AS(g.load(100), std::out_of_range);
    CHECK_THROWS_AS(LoadGrid({1.0, 1.0}, {1e-12}), std::invalid_argument);
    CHECK(g.nearest(LoadState{1.16, 1.0e-12}) == 44);
    CHECK(g.nearest(LoadState{-5.0, 1.0}) == g.id(0, 9));
  }

  TEST_CASE("wave attribute validation") {
    CHECK_THROWS_AS((WaveAttributes{45.0, 0.0, Polarization::TE, 1.0}.validate()),
                    std::invalid_argument);
    CHECK_THROWS_AS((WaveAttributes{0.0, 80.0, Polarization::TE, 1.0}.validate()),
                    std::invalid_argument);
    CHECK_THROWS_AS((WaveAttributes{0.0, 10.0, Polarization::TE, 0.0}.validate()),
                    std::invalid_argument);
    CHECK_NOTHROW((WaveAttributes{90.0, 75.0, Polarization::TM, 2.0}.validate()));
  }

  TEST_CASE("default wave set ordering") {
    const auto ws = default_wave_set();
    REQUIRE(ws.size() == 32);
    CHECK(ws[0].elevation_deg == 0.0);
    CHECK(ws[0].polarization == Polarization::TE);
    CHECK(ws[10].elevation_deg == 50.0);
    CHECK(ws[10].polarization == Polarization::TE);
    CHECK(ws[16].polarization == Polarization::TM);
    CHECK(ws[31].elevation_deg == 75.0);
  }

  TEST_CASE("function map agrees with an exhaustive scan of the oracle") {
    const auto m = SurfaceModel::calibrated();
    const auto grid = LoadGrid::default_grid();
    const auto ws = default_wave_set();
    for (auto isa : {kernels::Isa::Scalar, kernels::Isa::Avx2}) {
      if (!kernels::isa_available(isa)) continue;
      kernels::force_isa(isa);
      const auto map = build_function_map(ws, grid, m);
      REQUIRE(map.size() == ws.size());
      for (const auto& e : map.entries()) {
        std::size_t best = 0;
        double best_a = -1.0;
        for (std::size_t k = 0; k < grid.size(); ++k) {
          const auto l = grid.load(k);
          const double a = oracle_absorption(e.wave.elevation_deg,
                                             e.wave.polarization == Polarization::TE,
                                             l.resistance_ohm, l.capacitance_farad);
          if (a > best_a) {
            best_a = a;
            best = k;
          }
        }
        CHECK(e.grid_id == best);
        CHECK(e.load.resistance_ohm == grid.load(best).resistance_ohm);
        CHECK(e.load.capacitance_farad == grid.load(best).capacitance_farad);
      }
    }
    kernels::reset_isa();
  }

  TEST_CASE("reverse lookup returns the entry for its own load, lowest id on shared loads") {
    const auto m = SurfaceModel::calibrated();
    const auto map = build_function_map(default_wave_set(), LoadGrid::default_grid(), m);
    for (const auto& e : map.entries()) {
      const auto hit = reverse_lookup(map, e.load);
      CHECK(map.at(hit.function_id).grid_id == e.grid_id);
      int lowest = e.function_id;
      for (const auto& o : map.entries())
        if (o.grid_id == e.grid_id) lowest = std::min(lowest, o.function_id);
      CHECK(hit.function_id == lowest);
    }
    // f_id 10 (TE 50 deg) owns its load alone under the default grid.
    const auto hit = reverse_lookup(map, map.at(10).load);
    CHECK(hit.function_id == 10);
  }

  TEST_CASE("function map rejects duplicate waves and empty input") {
    const auto m = SurfaceModel::calibrated();
    auto ws = default_wave_set();
    ws.push_back(ws[3]);
    CHECK_THROWS_AS(build_function_map(ws, LoadGrid::default_grid(), m), std::invalid_argument);
    CHECK_THROWS_AS(build_function_map({}, LoadGrid::default_grid(), m), std::invalid_argument);
  }

  TEST_CASE("dissipated power lands on the co-polarised element") {
    const auto m = SurfaceModel::calibrated();
    const LoadState cal{1.15, 0.99e-12};
    const WaveAttributes te0{0.0, 0.0, Polarization::TE, 2.0};
    const auto p = dissipated_power_per_element(te0, cal, m);
    CHECK(p.x_element_w == 0.0);
    CHECK(p.y_element_w == doctest::Approx(2.0 * 0.01 * 0.01 * absorption_coefficient(te0, cal, m)));
    const WaveAttributes tm90{90.0, 30.0, Polarization::TM, 1.0};
    const auto q = dissipated_power_per_element(tm90, cal, m);
    CHECK(q.x_element_w == 0.0);
    CHECK(q.y_element_w > 0.0);
  }

  TEST_CASE("synthesised dataset is uniform across nodes and consistent with the model") {
    const auto m = SurfaceModel::calibrated();
    const auto grid = LoadGrid::default_grid();
    const auto ws = default_wave_set();
    const auto ds = synthesize_dataset(ws, grid, m, 6);
    CHECK_NOTHROW(ds.validate());
    CHECK(ds.uniform_across_nodes());
    for (std::size_t w = 0; w < ws.size(); w += 5)
      for (std::size_t k = 0; k < grid.size(); k += 7)
        CHECK(ds.at(w, k, 5) == dissipated_power(ws[w], grid.load(k), m));
    // Argmax of each wave's power row is its map entry's load.
    const auto map = build_function_map(ws, grid, m);
    for (std::size_t w = 0; w < ws.size(); ++w) {
      std::size_t best = 0;
      for (std::size_t k = 1; k < grid.size(); ++k)
        if (ds.at(w, k, 0) > ds.at(w, best, 0)) best = k;
      CHECK(best == map.at(static_cast<int>(w)).grid_id);
    }
  }

  TEST_CASE("load state reactance round trip") {
    const double w = 2.0 * kPi * 5e9;
    const LoadState s{1.0, 1e-12};
    const auto back = LoadState::from_reactance(1.0, s.reactance_ohm(w), w);
    CHECK(back.capacitance_farad == doctest::Approx(1e-12).epsilon(1e-14));
    CHECK(std::isinf(LoadState::from_reactance(1.0, 5.0, w).capacitance_farad));
  }
}
