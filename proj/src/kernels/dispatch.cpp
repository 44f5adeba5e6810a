#include "relayabc/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace relayabc::kernels {

namespace {

struct Table {
  Backend backend;
  void (*axpy)(double, std::span<const double>, std::span<double>);
  double (*sum)(std::span<const double>);
  MinMax (*min_max)(std::span<const double>);
  double (*max_abs_diff)(std::span<const double>, std::span<const double>);
};

constexpr Table kScalarTable{Backend::Scalar, &scalar::axpy, &scalar::sum, &scalar::min_max,
                             &scalar::max_abs_diff};

#if defined(RELAYABC_HAVE_AVX2)
constexpr Table kAvx2Table{Backend::Avx2, &avx2::axpy, &avx2::sum, &avx2::min_max,
                           &avx2::max_abs_diff};
#endif

#if defined(RELAYABC_HAVE_NEON)
constexpr Table kNeonTable{Backend::Neon, &neon::axpy, &neon::sum, &neon::min_max,
                           &neon::max_abs_diff};
#endif

const Table* table_for(Backend backend) {
  switch (backend) {
    case Backend::Scalar:
      return &kScalarTable;
    case Backend::Avx2:
#if defined(RELAYABC_HAVE_AVX2)
      if (__builtin_cpu_supports("avx2")) {
        return &kAvx2Table;
      }
#endif
      return nullptr;
    case Backend::Neon:
#if defined(RELAYABC_HAVE_NEON)
      return &kNeonTable;
#else
      return nullptr;
#endif
  }
  return nullptr;
}

const Table* detect() {
  if (const char* env = std::getenv("RELAYABC_KERNELS")) {
    if (std::string(env) == "scalar") {
      return &kScalarTable;
    }
  }
  for (Backend candidate : {Backend::Avx2, Backend::Neon}) {
    if (const Table* t = table_for(candidate)) {
      return t;
    }
  }
  return &kScalarTable;
}

std::atomic<const Table*> g_table{nullptr};

const Table& current() {
  const Table* t = g_table.load(std::memory_order_acquire);
  if (t == nullptr) {
    t = detect();
    g_table.store(t, std::memory_order_release);
  }
  return *t;
}

void require_same_size(std::size_t a, std::size_t b) {
  if (a != b) {
    throw std::invalid_argument("kernel operands differ in length");
  }
}

}  // namespace

std::string_view backend_name(Backend backend) {
  switch (backend) {
    case Backend::Scalar:
      return "scalar";
    case Backend::Avx2:
      return "avx2";
    case Backend::Neon:
      return "neon";
  }
  return "unknown";
}

bool backend_supported(Backend backend) { return table_for(backend) != nullptr; }

Backend active_backend() { return current().backend; }

void force_backend(Backend backend) {
  const Table* t = table_for(backend);
  if (t == nullptr) {
    throw std::invalid_argument("kernel backend not available: " + std::string(backend_name(backend)));
  }
  g_table.store(t, std::memory_order_release);
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  require_same_size(x.size(), y.size());
  current().axpy(alpha, x, y);
}

double sum(std::span<const double> x) { return current().sum(x); }

MinMax min_max(std::span<const double> x) {
  if (x.empty()) {
    throw std::invalid_argument("min_max of an empty range");
  }
  return current().min_max(x);
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  require_same_size(a.size(), b.size());
  return current().max_abs_diff(a, b);
}

}  // namespace relayabc::kernels
