#include "relayabc/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace relayabc::kernels::scalar {

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    y[i] += alpha * x[i];
  }
}

double sum(std::span<const double> x) {
  double acc = 0.0;
  for (double v : x) {
    acc += v;
  }
  return acc;
}

MinMax min_max(std::span<const double> x) {
  MinMax out{x[0], x[0]};
  for (std::size_t i = 1; i < x.size(); ++i) {
    out.min = std::min(out.min, x[i]);
    out.max = std::max(out.max, x[i]);
  }
  return out;
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    worst = std::max(worst, std::fabs(a[i] - b[i]));
  }
  return worst;
}

}  // namespace relayabc::kernels::scalar
