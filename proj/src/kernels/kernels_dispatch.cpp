#include <atomic>
#include <string>
#include <stdexcept>

#include "absense/kernels.hpp"

namespace absense::kernels {

namespace {

bool cpu_has_avx2() {
#if defined(ABSENSE_HAVE_AVX2_TU) && (defined(__GNUC__) || defined(__clang__))
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

Isa detect() { return cpu_has_avx2() ? Isa::Avx2 : Isa::Scalar; }

std::atomic<Isa>& selected() {
  static std::atomic<Isa> isa{detect()};
  return isa;
}

}  // namespace

const char* to_string(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
  }
  return "?";
}

bool isa_available(Isa isa) {
  if (isa == Isa::Scalar) return true;
  return cpu_has_avx2();
}

Isa active_isa() { return selected().load(std::memory_order_relaxed); }

void force_isa(Isa isa) {
  if (!isa_available(isa)) throw std::runtime_error(std::string("kernel variant unavailable: ") + to_string(isa));
  selected().store(isa, std::memory_order_relaxed);
}

void reset_isa() { selected().store(detect(), std::memory_order_relaxed); }

void absorption_sweep(double eta, std::span<const double> sheet_re,
                      std::span<const double> sheet_im, std::span<double> out) {
  if (sheet_re.size() != sheet_im.size() || sheet_re.size() != out.size())
    throw std::invalid_argument("absorption_sweep: span sizes differ");
#ifdef ABSENSE_HAVE_AVX2_TU
  if (active_isa() == Isa::Avx2) {
    avx2::absorption_sweep(eta, sheet_re.data(), sheet_im.data(), out.data(), out.size());
    return;
  }
#endif
  scalar::absorption_sweep(eta, sheet_re.data(), sheet_im.data(), out.data(), out.size());
}

std::size_t argmax_first(std::span<const double> values) {
#ifdef ABSENSE_HAVE_AVX2_TU
  if (active_isa() == Isa::Avx2) return avx2::argmax_first(values.data(), values.size());
#endif
  return scalar::argmax_first(values.data(), values.size());
}

}  // namespace absense::kernels
