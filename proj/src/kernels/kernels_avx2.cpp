// AVX2 variants. This translation unit is compiled with -mavx2 (no -mfma) and
// is only entered after a runtime CPU check.

#include "relayabc/kernels.hpp"

#include <immintrin.h>

#include <algorithm>
#include <cmath>

namespace relayabc::kernels::avx2 {

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  const std::size_t n = x.size();
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d vx = _mm256_loadu_pd(x.data() + i);
    const __m256d vy = _mm256_loadu_pd(y.data() + i);
    // Separate mul and add so the rounding matches the scalar loop exactly.
    _mm256_storeu_pd(y.data() + i, _mm256_add_pd(vy, _mm256_mul_pd(va, vx)));
  }
  for (; i < n; ++i) {
    y[i] += alpha * x[i];
  }
}

double sum(std::span<const double> x) {
  const std::size_t n = x.size();
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(x.data() + i));
    acc1 = _mm256_add_pd(acc1, _mm256_loadu_pd(x.data() + i + 4));
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(x.data() + i));
  }
  acc0 = _mm256_add_pd(acc0, acc1);
  const __m128d lo = _mm256_castpd256_pd128(acc0);
  const __m128d hi = _mm256_extractf128_pd(acc0, 1);
  __m128d pair = _mm_add_pd(lo, hi);
  pair = _mm_add_sd(pair, _mm_unpackhi_pd(pair, pair));
  double total = _mm_cvtsd_f64(pair);
  for (; i < n; ++i) {
    total += x[i];
  }
  return total;
}

MinMax min_max(std::span<const double> x) {
  const std::size_t n = x.size();
  if (n < 4) {
    return scalar::min_max(x);
  }
  __m256d vmin = _mm256_loadu_pd(x.data());
  __m256d vmax = vmin;
  std::size_t i = 4;
  for (; i + 4 <= n; i += 4) {
    const __m256d v = _mm256_loadu_pd(x.data() + i);
    vmin = _mm256_min_pd(vmin, v);
    vmax = _mm256_max_pd(vmax, v);
  }
  alignas(32) double lanes_min[4];
  alignas(32) double lanes_max[4];
  _mm256_store_pd(lanes_min, vmin);
  _mm256_store_pd(lanes_max, vmax);
  MinMax out{lanes_min[0], lanes_max[0]};
  for (int k = 1; k < 4; ++k) {
    out.min = std::min(out.min, lanes_min[k]);
    out.max = std::max(out.max, lanes_max[k]);
  }
  for (; i < n; ++i) {
    out.min = std::min(out.min, x[i]);
    out.max = std::max(out.max, x[i]);
  }
  return out;
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  const std::size_t n = a.size();
  const __m256d sign = _mm256_set1_pd(-0.0);
  __m256d worst = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a.data() + i), _mm256_loadu_pd(b.data() + i));
    worst = _mm256_max_pd(_mm256_andnot_pd(sign, d), worst);  // NaN lanes keep worst, as std::max does
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, worst);
  double out = std::max(std::max(lanes[0], lanes[1]), std::max(lanes[2], lanes[3]));
  for (; i < n; ++i) {
    out = std::max(out, std::fabs(a[i] - b[i]));
  }
  return out;
}

}  // namespace relayabc::kernels::avx2
