#pragma once

// Independent reference implementations used as test oracles. None of these
// call into the library code they check.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "relayabc/graph.hpp"
#include "relayabc/matrix.hpp"

namespace oracle {

/// Removes the current minimum and maximum b times, then averages what is left.
inline double trimmed_mean(std::vector<double> v, std::size_t b) {
  for (std::size_t k = 0; k < b; ++k) {
    v.erase(std::min_element(v.begin(), v.end()));
    v.erase(std::max_element(v.begin(), v.end()));
  }
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

/// Floyd-Warshall over the edge list.
inline std::vector<std::vector<std::size_t>> distances(const relayabc::DirectedNetwork& g) {
  const std::size_t n = g.node_count();
  const std::size_t inf = std::numeric_limits<std::size_t>::max() / 4;
  std::vector<std::vector<std::size_t>> d(n, std::vector<std::size_t>(n, inf));
  for (std::size_t i = 0; i < n; ++i) d[i][i] = 0;
  for (auto [a, b] : g.edges()) d[a][b] = 1;
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) d[i][j] = std::min(d[i][j], d[i][k] + d[k][j]);
  for (auto& row : d)
    for (auto& x : row)
      if (x >= inf) x = relayabc::kUnreachable;
  return d;
}

inline std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  std::uint64_t r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

/// Every 0/1 adjacency (row = receiver) with all-ones diagonal and exactly
/// h-1-b off-diagonal ones per row, by brute force over bitmasks.
inline std::vector<std::vector<std::vector<std::uint8_t>>> reduced_adjacencies(std::size_t h, std::size_t b) {
  std::vector<std::vector<std::uint8_t>> rows_for;  // per node: allowed masks
  std::vector<std::vector<std::uint32_t>> masks(h);
  for (std::size_t i = 0; i < h; ++i) {
    for (std::uint32_t m = 0; m < (1u << h); ++m) {
      if (m & (1u << i)) continue;
      if (static_cast<std::size_t>(__builtin_popcount(m)) == h - 1 - b) masks[i].push_back(m);
    }
  }
  std::vector<std::vector<std::vector<std::uint8_t>>> out;
  std::vector<std::size_t> pick(h, 0);
  while (true) {
    std::vector<std::vector<std::uint8_t>> a(h, std::vector<std::uint8_t>(h, 0));
    for (std::size_t i = 0; i < h; ++i) {
      a[i][i] = 1;
      for (std::size_t j = 0; j < h; ++j)
        if (masks[i][pick[i]] & (1u << j)) a[i][j] = 1;
    }
    out.push_back(std::move(a));
    std::size_t k = h;
    while (k > 0) {
      --k;
      if (++pick[k] < masks[k].size()) break;
      pick[k] = 0;
      if (k == 0) return out;
    }
  }
}

/// Nodes reaching every node, by Warshall closure on adjacency (row = receiver).
inline std::vector<std::size_t> sources(const std::vector<std::vector<std::uint8_t>>& a) {
  const std::size_t h = a.size();
  std::vector<std::vector<bool>> reach(h, std::vector<bool>(h, false));  // reach[from][to]
  for (std::size_t to = 0; to < h; ++to)
    for (std::size_t from = 0; from < h; ++from) reach[from][to] = a[to][from] != 0 || from == to;
  for (std::size_t k = 0; k < h; ++k)
    for (std::size_t i = 0; i < h; ++i)
      for (std::size_t j = 0; j < h; ++j)
        if (reach[i][k] && reach[k][j]) reach[i][j] = true;
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < h; ++i)
    if (std::all_of(reach[i].begin(), reach[i].end(), [](bool x) { return x; })) out.push_back(i);
  return out;
}

/// Textbook triple loop.
inline relayabc::Matrix multiply(const relayabc::Matrix& a, const relayabc::Matrix& b) {
  relayabc::Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < a.cols(); ++k) s += a(i, k) * b(k, j);
      c(i, j) = s;
    }
  return c;
}

inline double max_abs_diff(const relayabc::Matrix& a, const relayabc::Matrix& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) worst = std::max(worst, std::abs(a(i, j) - b(i, j)));
  return worst;
}

}  // namespace oracle

namespace fixtures {

constexpr double t3 = 1.0 / 3.0, n1 = 1.0 / 9.0, n2 = 2.0 / 9.0, n4 = 4.0 / 9.0;

// h = 3, D = 2 sample with non-zero entries at the last-block diagonal.
inline relayabc::Matrix diagonal_sample() {
  return {{0, 0, t3, t3, t3, 0}, {0, 0, 0, t3, t3, t3}, {t3, 0, 0, 0, t3, t3},
          {0, 0, n1, n2, n2, n4}, {n1, 0, n1, n2, t3, n2}, {n1, 0, 0, n4, n2, n2}};
}

// Product of many phase matrices, bottom-right block with a positive middle column.
inline relayabc::Matrix z_sample() {
  return {{0, t3, t3, t3, 0, 0}, {0, 0, 0, t3, t3, t3}, {t3, 0, t3, 0, 0, t3},
          {0, 0, n1, n2, n2, n4}, {n1, 0, n1, n2, t3, n2}, {n1, 0, 0, n4, n2, n2}};
}

// Z times one more phase matrix: column 4 is positive throughout.
inline relayabc::Matrix zm_sample() {
  return {{0, 0, t3, t3, t3, 0}, {0, 0, 0, t3, t3, t3}, {t3, 0, 0, 0, t3, t3},
          {0, 0, n1, n2, n2, n4}, {n1, 0, n1, n2, t3, n2}, {n1, 0, 0, n4, n2, n2}};
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path temp_dir(const std::string& tag) {
  static std::mt19937_64 rng(std::random_device{}());
  auto p = std::filesystem::temp_directory_path() / ("relayabc_" + tag + "_" + std::to_string(rng()));
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace fixtures
