#pragma once

// Dense double-precision inner loops used by the matrix analysis.
//
// Every kernel has a scalar reference implementation and, where the target
// supports it, a vector variant (AVX2 on x86-64, NEON on AArch64). The active
// variant is picked once at first use from the CPU feature set; setting
// RELAYABC_KERNELS=scalar in the environment pins the scalar path.
//
// axpy, min_max and max_abs_diff are element-wise and produce bit-identical
// results on every backend. sum is a reduction whose association order is
// backend-specific, so backends agree only to rounding.

#include <cstddef>
#include <span>
#include <string_view>

namespace relayabc::kernels {

enum class Backend { Scalar, Avx2, Neon };

std::string_view backend_name(Backend backend);

bool backend_supported(Backend backend);

/// Backend currently used by the dispatching entry points.
Backend active_backend();

/// Pins the dispatching entry points to `backend`. Throws std::invalid_argument
/// when the CPU or build does not provide it.
void force_backend(Backend backend);

struct MinMax {
  double min;
  double max;
};

/// y[i] += alpha * x[i]. Sizes must match.
void axpy(double alpha, std::span<const double> x, std::span<double> y);

double sum(std::span<const double> x);

/// Requires a non-empty input.
MinMax min_max(std::span<const double> x);

/// max_i |a[i] - b[i]|, 0 for empty inputs. Sizes must match.
double max_abs_diff(std::span<const double> a, std::span<const double> b);

namespace scalar {
void axpy(double alpha, std::span<const double> x, std::span<double> y);
double sum(std::span<const double> x);
MinMax min_max(std::span<const double> x);
double max_abs_diff(std::span<const double> a, std::span<const double> b);
}  // namespace scalar

namespace avx2 {
void axpy(double alpha, std::span<const double> x, std::span<double> y);
double sum(std::span<const double> x);
MinMax min_max(std::span<const double> x);
double max_abs_diff(std::span<const double> a, std::span<const double> b);
}  // namespace avx2

namespace neon {
void axpy(double alpha, std::span<const double> x, std::span<double> y);
double sum(std::span<const double> x);
MinMax min_max(std::span<const double> x);
double max_abs_diff(std::span<const double> a, std::span<const double> b);
}  // namespace neon

}  // namespace relayabc::kernels
