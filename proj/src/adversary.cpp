#include "relayabc/adversary.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace relayabc {

namespace {

constexpr std::pair<StrategyKind, std::string_view> kNames[] = {
    {StrategyKind::Silent, "silent"},
    {StrategyKind::ConstantExtreme, "constant_extreme"},
    {StrategyKind::RandomEquivocate, "random_equivocate"},
    {StrategyKind::ReplayStale, "replay_stale"},
    {StrategyKind::ForgeAttempt, "forge_attempt"},
    {StrategyKind::FutureMarker, "future_marker"},
    {StrategyKind::Scripted, "scripted"},
};

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Uniform in [0, 1), a pure function of its inputs.
double unit_draw(std::uint64_t seed, std::uint64_t offset, NodeId self, Marker t, NodeId neighbor) {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ offset);
  h = splitmix64(h ^ self);
  h = splitmix64(h ^ static_cast<std::uint64_t>(t));
  h = splitmix64(h ^ neighbor);
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

StateRecord self_signed(const ByzantineCredentials& creds, NodeId origin, double value, Marker marker) {
  return StateRecord{origin, value, marker, creds.scheme->sign(*creds.own_key, origin, value, marker)};
}

void append_relay(std::vector<StateRecord>& payload, const std::vector<std::optional<StateRecord>>& records,
                  NodeId self) {
  for (const auto& r : records) {
    if (r && r->origin != self) payload.push_back(*r);
  }
}

Outbox broadcast_same(std::span<const NodeId> neighbors, const std::vector<StateRecord>& payload) {
  Outbox out;
  for (NodeId n : neighbors) out.emplace_back(n, payload);
  return out;
}

}  // namespace

std::string_view strategy_name(StrategyKind kind) {
  for (auto [k, name] : kNames) {
    if (k == kind) return name;
  }
  return "unknown";
}

StrategyKind strategy_from_name(std::string_view name) {
  for (auto [k, n] : kNames) {
    if (n == name) return k;
  }
  throw std::invalid_argument("unknown byzantine strategy: " + std::string(name));
}

bool operator==(const ScriptRecord& a, const ScriptRecord& b) {
  return a.origin == b.origin && a.value == b.value && a.marker == b.marker;
}

bool operator==(const ScriptEntry& a, const ScriptEntry& b) {
  return a.t == b.t && a.to == b.to && a.relay == b.relay && a.records == b.records;
}

AdversaryMemory::AdversaryMemory(NodeId self, std::size_t node_count, std::size_t history_depth)
    : self_(self), freshest_(node_count), depth_(history_depth + 1) {
  history_.push_back(freshest_);
}

void AdversaryMemory::absorb(std::span<const InboundMessage> inbox, const Verifier& verifier) {
  for (const auto& msg : inbox) {
    for (const auto& r : msg.records) {
      if (r.origin >= freshest_.size()) continue;
      auto& slot = freshest_[r.origin];
      if (slot && slot->marker >= r.marker) continue;
      if (!verifier.verify(r.origin, r.value, r.marker, r.signature)) continue;
      slot = r;
    }
  }
  history_.push_back(freshest_);
  while (history_.size() > depth_) history_.pop_front();
}

const std::vector<std::optional<StateRecord>>& AdversaryMemory::snapshot(std::size_t age) const {
  if (age >= history_.size()) return history_.front();
  return history_[history_.size() - 1 - age];
}

Outbox byzantine_outbox(const StrategySpec& spec, const AdversaryMemory& memory, Marker t,
                        std::span<const NodeId> neighbors, const ByzantineCredentials& creds) {
  const NodeId self = creds.self;
  const Marker last = t - 1;  // freshest marker a receiver accepts at iteration t
  switch (spec.kind) {
    case StrategyKind::Silent:
      return {};

    case StrategyKind::ConstantExtreme: {
      std::vector<StateRecord> payload{self_signed(creds, self, spec.value, last)};
      append_relay(payload, memory.freshest(), self);
      return broadcast_same(neighbors, payload);
    }

    case StrategyKind::RandomEquivocate: {
      Outbox out;
      for (NodeId n : neighbors) {
        const double u = unit_draw(creds.seed, spec.seed_offset, self, t, n);
        std::vector<StateRecord> payload{self_signed(creds, self, spec.low + u * (spec.high - spec.low), last)};
        append_relay(payload, memory.freshest(), self);
        out.emplace_back(n, std::move(payload));
      }
      return out;
    }

    case StrategyKind::ReplayStale: {
      std::vector<StateRecord> payload{self_signed(creds, self, spec.value, last)};
      append_relay(payload, memory.snapshot(spec.age), self);
      return broadcast_same(neighbors, payload);
    }

    case StrategyKind::ForgeAttempt: {
      std::vector<StateRecord> payload{self_signed(creds, self, spec.value, last)};
      for (NodeId origin = 0; origin < memory.freshest().size(); ++origin) {
        if (origin != self) payload.push_back(self_signed(creds, origin, spec.value, last));
      }
      return broadcast_same(neighbors, payload);
    }

    case StrategyKind::FutureMarker:
      return broadcast_same(neighbors, {self_signed(creds, self, spec.value, t + std::max<Marker>(spec.lead, 0))});

    case StrategyKind::Scripted: {
      Outbox out;
      for (NodeId n : neighbors) {
        std::vector<StateRecord> payload;
        bool any = false;
        for (const auto& entry : spec.script) {
          if (entry.t != t || (entry.to && *entry.to != n)) continue;
          any = true;
          for (const auto& r : entry.records) payload.push_back(self_signed(creds, r.origin, r.value, r.marker));
          if (entry.relay) append_relay(payload, memory.freshest(), self);
        }
        if (any) out.emplace_back(n, std::move(payload));
      }
      return out;
    }
  }
  return {};
}

}  // namespace relayabc
