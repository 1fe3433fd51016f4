#include "absense/kernels.hpp"

#include <immintrin.h>

namespace absense::kernels::avx2 {

void absorption_sweep(double eta, const double* re, const double* im, double* out, std::size_t n) {
  const __m256d veta = _mm256_set1_pd(eta);
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d zero = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d r = _mm256_loadu_pd(re + i);
    const __m256d x = _mm256_loadu_pd(im + i);
    const __m256d dm = _mm256_sub_pd(r, veta);
    const __m256d dp = _mm256_add_pd(r, veta);
    const __m256d x2 = _mm256_mul_pd(x, x);
    const __m256d num = _mm256_add_pd(_mm256_mul_pd(dm, dm), x2);
    const __m256d den = _mm256_add_pd(_mm256_mul_pd(dp, dp), x2);
    __m256d a = _mm256_sub_pd(one, _mm256_div_pd(num, den));
    a = _mm256_min_pd(one, _mm256_max_pd(zero, a));
    _mm256_storeu_pd(out + i, a);
  }
  scalar::absorption_sweep(eta, re + i, im + i, out + i, n - i);
}

std::size_t argmax_first(const double* values, std::size_t n) {
  if (n < 8) return scalar::argmax_first(values, n);

  __m256d best = _mm256_loadu_pd(values);
  __m256d best_idx = _mm256_set_pd(3.0, 2.0, 1.0, 0.0);
  __m256d idx = best_idx;
  const __m256d step = _mm256_set1_pd(4.0);
  std::size_t i = 4;
  for (; i + 4 <= n; i += 4) {
    idx = _mm256_add_pd(idx, step);
    const __m256d v = _mm256_loadu_pd(values + i);
    const __m256d gt = _mm256_cmp_pd(v, best, _CMP_GT_OQ);
    best = _mm256_blendv_pd(best, v, gt);
    best_idx = _mm256_blendv_pd(best_idx, idx, gt);
  }

  alignas(32) double lane_val[4];
  alignas(32) double lane_idx[4];
  _mm256_store_pd(lane_val, best);
  _mm256_store_pd(lane_idx, best_idx);
  double top = lane_val[0];
  double top_idx = lane_idx[0];
  for (int l = 1; l < 4; ++l) {
    if (lane_val[l] > top || (lane_val[l] == top && lane_idx[l] < top_idx)) {
      top = lane_val[l];
      top_idx = lane_idx[l];
    }
  }
  auto result = static_cast<std::size_t>(top_idx);
  for (; i < n; ++i) {
    if (values[i] > values[result]) result = i;
  }
  return result;
}

}  // namespace absense::kernels::avx2
