#include "relayabc/reduced_graph.hpp"

#include <algorithm>
#include <deque>
#include <random>
#include <stdexcept>
#include <string>

#include "relayabc/errors.hpp"

namespace relayabc {

namespace {

void build_combos(std::size_t n, std::size_t k, std::size_t start, std::vector<std::size_t>& prefix,
                  std::vector<std::vector<std::size_t>>& out) {
  if (prefix.size() == k) {
    out.push_back(prefix);
    return;
  }
  for (std::size_t p = start; p + (k - prefix.size()) <= n; ++p) {
    prefix.push_back(p);
    build_combos(n, k, p + 1, prefix, out);
    prefix.pop_back();
  }
}

NodeId candidate(NodeId owner, std::size_t position) {
  // Candidates of `owner` are the other ids in ascending order.
  return position < owner ? static_cast<NodeId>(position) : static_cast<NodeId>(position + 1);
}

}  // namespace

std::vector<std::vector<std::uint8_t>> ReducedGraph::adjacency() const {
  std::vector<std::vector<std::uint8_t>> a(h, std::vector<std::uint8_t>(h, 0));
  for (std::size_t i = 0; i < h; ++i) {
    a[i][i] = 1;
    for (NodeId j : kept_in[i]) a[i][j] = 1;
  }
  return a;
}

bool ReducedGraph::has_edge(NodeId from, NodeId to) const {
  if (from == to) return true;
  const auto& kept = kept_in.at(to);
  return std::binary_search(kept.begin(), kept.end(), from);
}

ReducedGraphSpace::ReducedGraphSpace(std::size_t h, std::size_t b) : h_(h), b_(b) {
  if (h < 2 * b + 1) {
    throw std::invalid_argument("reduced graphs need h >= 2b + 1 (h=" + std::to_string(h) +
                                ", b=" + std::to_string(b) + ")");
  }
  std::vector<std::size_t> prefix;
  build_combos(h - 1, h - 1 - b, 0, prefix, combos_);
  const std::uint64_t base = combos_.size();
  std::uint64_t total = 1;
  for (std::size_t i = 0; i < h; ++i) {
    if (total > UINT64_MAX / base) {
      return;
    }
    total *= base;
  }
  count_ = total;
}

ReducedGraph ReducedGraphSpace::at(std::uint64_t index) const {
  if (!count_ || index >= *count_) {
    throw IndexOutOfRange("reduced graph index " + std::to_string(index) + " out of range");
  }
  ReducedGraph rg;
  rg.h = h_;
  rg.b = b_;
  rg.index = index;
  rg.kept_in.resize(h_);
  const std::uint64_t base = combos_.size();
  for (std::size_t i = h_; i-- > 0;) {
    const auto& combo = combos_[index % base];
    index /= base;
    for (std::size_t p : combo) rg.kept_in[i].push_back(candidate(static_cast<NodeId>(i), p));
  }
  return rg;
}

std::vector<ReducedGraph> ReducedGraphSpace::enumerate(std::uint64_t cap) const {
  if (!count_ || *count_ > cap) {
    throw TooLarge("reduced graph count for h=" + std::to_string(h_) + ", b=" + std::to_string(b_) +
                   " exceeds cap " + std::to_string(cap) + "; use sampled mode");
  }
  std::vector<ReducedGraph> all;
  all.reserve(*count_);
  for (std::uint64_t k = 0; k < *count_; ++k) all.push_back(at(k));
  return all;
}

std::vector<ReducedGraph> ReducedGraphSpace::sample(std::size_t n, std::uint64_t seed) const {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::uint64_t> pick(0, combos_.size() - 1);
  const std::uint64_t base = combos_.size();
  std::vector<ReducedGraph> out;
  out.reserve(n);
  for (std::size_t s = 0; s < n; ++s) {
    ReducedGraph rg;
    rg.h = h_;
    rg.b = b_;
    rg.kept_in.resize(h_);
    std::uint64_t index = 0;
    for (std::size_t i = 0; i < h_; ++i) {
      const std::uint64_t digit = pick(rng);
      if (count_) index = index * base + digit;
      for (std::size_t p : combos_[digit]) rg.kept_in[i].push_back(candidate(static_cast<NodeId>(i), p));
    }
    rg.index = count_ ? index : 0;
    out.push_back(std::move(rg));
  }
  return out;
}

std::optional<std::uint64_t> ReducedGraphSpace::first_dominated_by(
    const std::vector<std::vector<std::uint8_t>>& pattern) const {
  if (!count_) return std::nullopt;
  const std::uint64_t base = combos_.size();
  std::uint64_t index = 0;
  for (std::size_t i = 0; i < h_; ++i) {
    if (!pattern.at(i).at(i)) return std::nullopt;
    std::optional<std::uint64_t> digit;
    for (std::uint64_t c = 0; c < base && !digit; ++c) {
      const bool fits = std::all_of(combos_[c].begin(), combos_[c].end(), [&](std::size_t p) {
        return pattern[i][candidate(static_cast<NodeId>(i), p)] != 0;
      });
      if (fits) digit = c;
    }
    if (!digit) return std::nullopt;
    index = index * base + *digit;
  }
  return index;
}

std::vector<ReducedGraph> enumerate_reduced_graphs(std::size_t h, std::size_t b, std::uint64_t cap) {
  return ReducedGraphSpace(h, b).enumerate(cap);
}

NodeId find_source_component(const ReducedGraph& rg) {
  // Forward adjacency: from -> receivers.
  std::vector<std::vector<NodeId>> out(rg.h);
  for (NodeId to = 0; to < rg.h; ++to) {
    for (NodeId from : rg.kept_in[to]) out[from].push_back(to);
  }
  std::vector<bool> seen(rg.h);
  std::deque<NodeId> queue;
  for (NodeId s = 0; s < rg.h; ++s) {
    std::fill(seen.begin(), seen.end(), false);
    seen[s] = true;
    std::size_t reached = 1;
    queue.assign(1, s);
    while (!queue.empty()) {
      const NodeId u = queue.front();
      queue.pop_front();
      for (NodeId v : out[u]) {
        if (!seen[v]) {
          seen[v] = true;
          ++reached;
          queue.push_back(v);
        }
      }
    }
    if (reached == rg.h) return s;
  }
  throw NoSource("reduced graph " + std::to_string(rg.index) + " has no source component");
}

}  // namespace relayabc
