#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

namespace relayabc {

using NodeId = std::uint32_t;

/// Static directed topology with a byzantine labelling. An edge (i, j) means
/// i may send to j. Self-edges are never stored; self-delivery is implicit.
class DirectedNetwork {
 public:
  DirectedNetwork() = default;
  explicit DirectedNetwork(std::size_t node_count);

  /// Throws std::out_of_range for ids >= node_count(). Self-edges and
  /// duplicates are ignored.
  void add_edge(NodeId from, NodeId to);
  void set_byzantine(NodeId node, bool byzantine = true);

  std::size_t node_count() const noexcept { return out_.size(); }
  std::size_t byzantine_count() const noexcept;
  std::size_t honest_count() const noexcept { return node_count() - byzantine_count(); }

  bool is_byzantine(NodeId node) const { return byzantine_.at(node); }
  bool has_edge(NodeId from, NodeId to) const;

  /// Sorted ascending.
  const std::vector<NodeId>& out_neighbors(NodeId node) const { return out_.at(node); }
  const std::vector<NodeId>& in_neighbors(NodeId node) const { return in_.at(node); }

  std::vector<NodeId> byzantine_ids() const;
  std::vector<NodeId> honest_ids() const;
  /// Sorted lexicographically.
  std::vector<std::pair<NodeId, NodeId>> edges() const;

  static DirectedNetwork complete(std::size_t node_count);

  friend bool operator==(const DirectedNetwork&, const DirectedNetwork&) = default;

 private:
  std::vector<std::vector<NodeId>> out_;
  std::vector<std::vector<NodeId>> in_;
  std::vector<bool> byzantine_;
};

/// Induced subgraph on the honest nodes, re-indexed 0..h-1.
struct HonestSubgraph {
  DirectedNetwork graph;
  std::vector<NodeId> to_original;  // honest index -> original id
  std::vector<std::int64_t> to_honest;  // original id -> honest index, -1 for byzantine
};

HonestSubgraph honest_subgraph(const DirectedNetwork& net);

inline constexpr std::size_t kUnreachable = std::numeric_limits<std::size_t>::max();

/// dist[i][j] = hop count of the shortest path i -> j, kUnreachable if none.
using DistanceMatrix = std::vector<std::vector<std::size_t>>;

DistanceMatrix shortest_distances(const DirectedNetwork& g);

/// Largest finite pairwise distance. Throws NotStronglyConnected if some pair
/// is unreachable.
std::size_t diameter(const DirectedNetwork& g);

bool strongly_connected(const DirectedNetwork& g);

// Topology presets. Honest nodes take ids 0..h-1, byzantine nodes h..h+b-1.

/// Complete directed graph on h + b nodes.
DirectedNetwork preset_complete(std::size_t h, std::size_t b);
/// Directed honest cycle 0 -> 1 -> ... -> h-1 -> 0; every byzantine node is
/// wired to and from every other node.
DirectedNetwork preset_honest_cycle_plus_byz(std::size_t h, std::size_t b);
/// Bidirectional honest path 0 - 1 - ... - h-1; byzantine nodes wired to and
/// from every other node.
DirectedNetwork preset_bidirectional_path_plus_byz(std::size_t h, std::size_t b);

}  // namespace relayabc
