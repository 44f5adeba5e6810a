// NEON variants for AArch64, where Advanced SIMD is part of the base ISA.

#include "relayabc/kernels.hpp"

#include <arm_neon.h>

#include <algorithm>
#include <cmath>

namespace relayabc::kernels::neon {

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  const std::size_t n = x.size();
  const float64x2_t va = vdupq_n_f64(alpha);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t vx = vld1q_f64(x.data() + i);
    const float64x2_t vy = vld1q_f64(y.data() + i);
    // vmulq + vaddq rather than vfmaq to round like the scalar loop.
    vst1q_f64(y.data() + i, vaddq_f64(vy, vmulq_f64(va, vx)));
  }
  for (; i < n; ++i) {
    y[i] += alpha * x[i];
  }
}

double sum(std::span<const double> x) {
  const std::size_t n = x.size();
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    acc = vaddq_f64(acc, vld1q_f64(x.data() + i));
  }
  double total = vaddvq_f64(acc);
  for (; i < n; ++i) {
    total += x[i];
  }
  return total;
}

MinMax min_max(std::span<const double> x) {
  const std::size_t n = x.size();
  if (n < 2) {
    return scalar::min_max(x);
  }
  float64x2_t vmin = vld1q_f64(x.data());
  float64x2_t vmax = vmin;
  std::size_t i = 2;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t v = vld1q_f64(x.data() + i);
    vmin = vminq_f64(vmin, v);
    vmax = vmaxq_f64(vmax, v);
  }
  MinMax out{vminvq_f64(vmin), vmaxvq_f64(vmax)};
  for (; i < n; ++i) {
    out.min = std::min(out.min, x[i]);
    out.max = std::max(out.max, x[i]);
  }
  return out;
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  const std::size_t n = a.size();
  float64x2_t worst = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t d = vabdq_f64(vld1q_f64(a.data() + i), vld1q_f64(b.data() + i));
    worst = vbslq_f64(vcgtq_f64(d, worst), d, worst);  // NaN lanes keep worst, as std::max does
  }
  double out = vmaxvq_f64(worst);
  for (; i < n; ++i) {
    out = std::max(out, std::fabs(a[i] - b[i]));
  }
  return out;
}

}  // namespace relayabc::kernels::neon
