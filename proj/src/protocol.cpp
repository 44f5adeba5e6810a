#include "relayabc/protocol.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>
#include <string>

#include "relayabc/errors.hpp"

namespace relayabc {

std::size_t record_wire_bytes(const StateRecord& r) { return 4 + 8 + 8 + r.signature.size(); }

LocalView LocalView::initial(NodeId owner, std::size_t node_count, double own_value,
                             const Signature& own_signature, double default_value) {
  LocalView view;
  view.owner = owner;
  view.records.resize(node_count);
  for (NodeId j = 0; j < node_count; ++j) {
    view.records[j] = StateRecord{j, default_value, kNoRecord, {}};
  }
  view.records.at(owner) = StateRecord{owner, own_value, kInitialMarker, own_signature};
  return view;
}

std::vector<StateRecord> LocalView::payload() const {
  std::vector<StateRecord> out;
  out.reserve(records.size());
  for (const auto& r : records) {
    if (r.held()) out.push_back(r);
  }
  return out;
}

bool TrimOutcome::survived(NodeId origin) const {
  const auto s = survivors();
  return std::any_of(s.begin(), s.end(), [origin](const TrimEntry& e) { return e.origin == origin; });
}

TrimOutcome trim_entries(std::vector<TrimEntry> entries, std::size_t b) {
  const std::size_t m = entries.size();
  if (m <= 2 * b) {
    throw BadCardinality("trimmed mean needs m > 2b (m=" + std::to_string(m) + ", b=" + std::to_string(b) + ")");
  }
  for (const auto& e : entries) {
    if (!std::isfinite(e.value)) throw std::invalid_argument("trimmed mean over a non-finite value");
  }
  std::stable_sort(entries.begin(), entries.end(), [](const TrimEntry& a, const TrimEntry& c) {
    return a.value < c.value || (a.value == c.value && a.origin < c.origin);
  });
  TrimOutcome out;
  out.sorted = std::move(entries);
  out.b = b;
  double acc = 0.0;
  for (const auto& e : out.survivors()) acc += e.value;
  out.mean = acc / static_cast<double>(m - 2 * b);
  return out;
}

double trimmed_mean(std::span<const double> values, std::size_t b) {
  std::vector<TrimEntry> entries;
  entries.reserve(values.size());
  for (std::size_t k = 0; k < values.size(); ++k) {
    entries.push_back({static_cast<NodeId>(k), values[k], kNoRecord});
  }
  return trim_entries(std::move(entries), b).mean;
}

namespace {

// Strict preference between two verified incoming candidates for one slot.
bool fresher(const StateRecord& a, const StateRecord& b) {
  if (a.marker != b.marker) return a.marker > b.marker;
  const auto abits = std::bit_cast<std::uint64_t>(a.value);
  const auto bbits = std::bit_cast<std::uint64_t>(b.value);
  if (abits != bbits) return abits < bbits;
  return a.signature < b.signature;
}

}  // namespace

LocalView merge_views(const LocalView& current, std::span<const InboundMessage> incoming, Marker t,
                      const Verifier& verifier, MergeStats* stats,
                      const std::vector<NodeId>* allowed_senders) {
  const std::size_t m = current.records.size();
  std::vector<const StateRecord*> best(m, nullptr);
  MergeStats local;

  for (const auto& msg : incoming) {
    if (allowed_senders &&
        !std::binary_search(allowed_senders->begin(), allowed_senders->end(), msg.sender)) {
      continue;
    }
    for (const auto& r : msg.records) {
      if (r.origin == current.owner) continue;
      if (r.origin >= m) {
        ++local.bad_signature;
        continue;
      }
      if (r.marker < kInitialMarker || r.marker >= t) {
        ++local.bad_marker;
        continue;
      }
      if (!std::isfinite(r.value)) {
        ++local.bad_value;
        continue;
      }
      if (!verifier.verify(r.origin, r.value, r.marker, r.signature)) {
        ++local.bad_signature;
        continue;
      }
      ++local.accepted;
      const StateRecord*& slot = best[r.origin];
      if (slot == nullptr || fresher(r, *slot)) slot = &r;
    }
  }

  LocalView merged = current;
  for (std::size_t j = 0; j < m; ++j) {
    if (best[j] != nullptr && best[j]->marker > merged.records[j].marker) {
      merged.records[j] = *best[j];
    }
  }
  if (stats) *stats = local;
  return merged;
}

HonestStepResult step_honest_node(const LocalView& node, std::span<const InboundMessage> inbox,
                                  const StepContext& ctx) {
  HonestStepResult out;
  out.merged = merge_views(node, inbox, ctx.t, ctx.keys->verifier(), &out.stats, ctx.allowed_senders);
  out.view = out.merged;
  if (ctx.t >= static_cast<Marker>(ctx.D)) {
    std::vector<TrimEntry> entries;
    entries.reserve(out.merged.records.size());
    for (const auto& r : out.merged.records) entries.push_back({r.origin, r.value, r.marker});
    out.trim = trim_entries(std::move(entries), ctx.b);
    const NodeId self = node.owner;
    out.view.records[self] = StateRecord{self, out.trim->mean, ctx.t, ctx.keys->sign(self, out.trim->mean, ctx.t)};
  }
  out.broadcast = out.view.payload();
  return out;
}

}  // namespace relayabc
