#include "relayabc/graph.hpp"

#include <algorithm>
#include <deque>
#include <stdexcept>
#include <string>

#include "relayabc/errors.hpp"

namespace relayabc {

namespace {

void insert_sorted(std::vector<NodeId>& list, NodeId value) {
  auto it = std::lower_bound(list.begin(), list.end(), value);
  if (it == list.end() || *it != value) {
    list.insert(it, value);
  }
}

}  // namespace

DirectedNetwork::DirectedNetwork(std::size_t node_count)
    : out_(node_count), in_(node_count), byzantine_(node_count, false) {}

void DirectedNetwork::add_edge(NodeId from, NodeId to) {
  if (from >= node_count() || to >= node_count()) {
    throw std::out_of_range("edge endpoint out of range: (" + std::to_string(from) + ", " +
                            std::to_string(to) + ")");
  }
  if (from == to) {
    return;
  }
  insert_sorted(out_[from], to);
  insert_sorted(in_[to], from);
}

void DirectedNetwork::set_byzantine(NodeId node, bool byzantine) { byzantine_.at(node) = byzantine; }

std::size_t DirectedNetwork::byzantine_count() const noexcept {
  return static_cast<std::size_t>(std::count(byzantine_.begin(), byzantine_.end(), true));
}

bool DirectedNetwork::has_edge(NodeId from, NodeId to) const {
  const auto& out = out_.at(from);
  return std::binary_search(out.begin(), out.end(), to);
}

std::vector<NodeId> DirectedNetwork::byzantine_ids() const {
  std::vector<NodeId> ids;
  for (NodeId i = 0; i < node_count(); ++i) {
    if (byzantine_[i]) ids.push_back(i);
  }
  return ids;
}

std::vector<NodeId> DirectedNetwork::honest_ids() const {
  std::vector<NodeId> ids;
  for (NodeId i = 0; i < node_count(); ++i) {
    if (!byzantine_[i]) ids.push_back(i);
  }
  return ids;
}

std::vector<std::pair<NodeId, NodeId>> DirectedNetwork::edges() const {
  std::vector<std::pair<NodeId, NodeId>> list;
  for (NodeId i = 0; i < node_count(); ++i) {
    for (NodeId j : out_[i]) list.emplace_back(i, j);
  }
  return list;
}

DirectedNetwork DirectedNetwork::complete(std::size_t node_count) {
  DirectedNetwork g(node_count);
  for (NodeId i = 0; i < node_count; ++i) {
    for (NodeId j = 0; j < node_count; ++j) g.add_edge(i, j);
  }
  return g;
}

HonestSubgraph honest_subgraph(const DirectedNetwork& net) {
  HonestSubgraph sub;
  sub.to_original = net.honest_ids();
  sub.to_honest.assign(net.node_count(), -1);
  for (std::size_t k = 0; k < sub.to_original.size(); ++k) {
    sub.to_honest[sub.to_original[k]] = static_cast<std::int64_t>(k);
  }
  sub.graph = DirectedNetwork(sub.to_original.size());
  for (auto [from, to] : net.edges()) {
    const auto hf = sub.to_honest[from];
    const auto ht = sub.to_honest[to];
    if (hf >= 0 && ht >= 0) {
      sub.graph.add_edge(static_cast<NodeId>(hf), static_cast<NodeId>(ht));
    }
  }
  return sub;
}

DistanceMatrix shortest_distances(const DirectedNetwork& g) {
  const std::size_t n = g.node_count();
  DistanceMatrix dist(n, std::vector<std::size_t>(n, kUnreachable));
  std::deque<NodeId> queue;
  for (NodeId s = 0; s < n; ++s) {
    auto& row = dist[s];
    row[s] = 0;
    queue.assign(1, s);
    while (!queue.empty()) {
      const NodeId u = queue.front();
      queue.pop_front();
      for (NodeId v : g.out_neighbors(u)) {
        if (row[v] == kUnreachable) {
          row[v] = row[u] + 1;
          queue.push_back(v);
        }
      }
    }
  }
  return dist;
}

std::size_t diameter(const DirectedNetwork& g) {
  std::size_t best = 0;
  const auto dist = shortest_distances(g);
  for (std::size_t i = 0; i < dist.size(); ++i) {
    for (std::size_t j = 0; j < dist.size(); ++j) {
      if (dist[i][j] == kUnreachable) {
        throw NotStronglyConnected("node " + std::to_string(j) + " is unreachable from node " +
                                   std::to_string(i));
      }
      best = std::max(best, dist[i][j]);
    }
  }
  return best;
}

bool strongly_connected(const DirectedNetwork& g) {
  for (const auto& row : shortest_distances(g)) {
    if (std::find(row.begin(), row.end(), kUnreachable) != row.end()) return false;
  }
  return true;
}

namespace {

DirectedNetwork with_byzantine_hub(DirectedNetwork g, std::size_t h, std::size_t b) {
  const std::size_t m = h + b;
  for (NodeId z = static_cast<NodeId>(h); z < m; ++z) {
    g.set_byzantine(z);
    for (NodeId other = 0; other < m; ++other) {
      g.add_edge(z, other);
      g.add_edge(other, z);
    }
  }
  return g;
}

}  // namespace

DirectedNetwork preset_complete(std::size_t h, std::size_t b) {
  DirectedNetwork g = DirectedNetwork::complete(h + b);
  for (NodeId z = static_cast<NodeId>(h); z < h + b; ++z) g.set_byzantine(z);
  return g;
}

DirectedNetwork preset_honest_cycle_plus_byz(std::size_t h, std::size_t b) {
  DirectedNetwork g(h + b);
  for (NodeId i = 0; i < h; ++i) g.add_edge(i, static_cast<NodeId>((i + 1) % h));
  return with_byzantine_hub(std::move(g), h, b);
}

DirectedNetwork preset_bidirectional_path_plus_byz(std::size_t h, std::size_t b) {
  DirectedNetwork g(h + b);
  for (NodeId i = 0; i + 1 < h; ++i) {
    g.add_edge(i, i + 1);
    g.add_edge(i + 1, i);
  }
  return with_byzantine_hub(std::move(g), h, b);
}

}  // namespace relayabc
