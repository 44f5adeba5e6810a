#pragma once

// Reduced graphs over h honest nodes: the complete graph on the honest set
// with exactly b incoming edges removed at every node. Self-loops are
// implicit, so each adjacency row holds h - b ones.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "relayabc/graph.hpp"

namespace relayabc {

struct ReducedGraph {
  std::size_t h = 0;
  std::size_t b = 0;
  /// Position in the lexicographic enumeration of the (h, b) space.
  std::uint64_t index = 0;
  /// kept_in[i]: sorted honest ids whose edge into i survives (self excluded).
  std::vector<std::vector<NodeId>> kept_in;

  /// Row i, column j is 1 iff j -> i is kept or i == j.
  std::vector<std::vector<std::uint8_t>> adjacency() const;
  /// True for kept edges and for every self-loop.
  bool has_edge(NodeId from, NodeId to) const;
};

inline constexpr std::uint64_t kDefaultReducedGraphCap = 1'000'000;

/// The set R of all reduced graphs for given (h, b), h >= 2b + 1.
/// Enumeration is lexicographic over (kept_in[0], ..., kept_in[h-1]), each
/// kept set ordered lexicographically as a sorted id list.
class ReducedGraphSpace {
 public:
  /// Throws std::invalid_argument when h < 2b + 1.
  ReducedGraphSpace(std::size_t h, std::size_t b);

  std::size_t h() const noexcept { return h_; }
  std::size_t b() const noexcept { return b_; }

  /// C(h-1, b)^h, or nullopt if it does not fit in 64 bits.
  std::optional<std::uint64_t> count() const noexcept { return count_; }

  /// Number of kept-set choices per node, C(h-1, b).
  std::uint64_t choices_per_node() const noexcept { return combos_.size(); }

  ReducedGraph at(std::uint64_t index) const;

  /// All graphs in order. Throws TooLarge if count() exceeds `cap`.
  std::vector<ReducedGraph> enumerate(std::uint64_t cap = kDefaultReducedGraphCap) const;

  /// `n` graphs drawn uniformly (with replacement) from a seeded generator.
  std::vector<ReducedGraph> sample(std::size_t n, std::uint64_t seed) const;

  /// Smallest-index graph whose adjacency is entrywise <= `pattern`
  /// (an h x h 0/1 matrix, row = receiver), or nullopt if none exists.
  std::optional<std::uint64_t> first_dominated_by(
      const std::vector<std::vector<std::uint8_t>>& pattern) const;

 private:
  std::size_t h_;
  std::size_t b_;
  std::vector<std::vector<std::size_t>> combos_;  // positions into the h-1 candidates
  std::optional<std::uint64_t> count_;
};

/// Convenience wrapper over ReducedGraphSpace::enumerate.
std::vector<ReducedGraph> enumerate_reduced_graphs(std::size_t h, std::size_t b,
                                                   std::uint64_t cap = kDefaultReducedGraphCap);

/// Smallest node with a directed path to every node. Throws NoSource if none.
NodeId find_source_component(const ReducedGraph& rg);

}  // namespace relayabc
