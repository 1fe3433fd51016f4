#include "absense/kernels.hpp"

#include <algorithm>

namespace absense::kernels::scalar {

double absorption_one(double eta, double sheet_re, double sheet_im) {
  const double dm = sheet_re - eta;
  const double dp = sheet_re + eta;
  const double im2 = sheet_im * sheet_im;
  const double num = dm * dm + im2;
  const double den = dp * dp + im2;
  const double a = 1.0 - num / den;
  return std::min(1.0, std::max(0.0, a));
}

void absorption_sweep(double eta, const double* re, const double* im, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = absorption_one(eta, re[i], im[i]);
}

std::size_t argmax_first(const double* values, std::size_t n) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < n; ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

}  // namespace absense::kernels::scalar
