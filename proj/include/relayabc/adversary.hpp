#pragma once

// Byzantine strategies. A strategy sees only its own signing key, the shared
// verifier and whatever it has received; it can never sign as an honest node.

#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "relayabc/auth.hpp"
#include "relayabc/protocol.hpp"

namespace relayabc {

enum class StrategyKind {
  Silent,            // sends nothing
  ConstantExtreme,   // own slot fixed at `value`, relays what it heard
  RandomEquivocate,  // own slot drawn per neighbour from [low, high], relays
  ReplayStale,       // resends genuine honest records `age` iterations old
  ForgeAttempt,      // records under honest ids signed with its own key
  FutureMarker,      // own slot stamped with marker t + lead
  Scripted,          // per-iteration payload table
};

std::string_view strategy_name(StrategyKind kind);
/// Throws std::invalid_argument for unknown names.
StrategyKind strategy_from_name(std::string_view name);

struct ScriptRecord {
  NodeId origin = 0;
  double value = 0.0;
  Marker marker = 0;
};

struct ScriptEntry {
  Marker t = 0;
  std::optional<NodeId> to;  // nullopt = every out-neighbour
  bool relay = false;
  std::vector<ScriptRecord> records;
};

struct StrategySpec {
  StrategyKind kind = StrategyKind::Silent;
  double value = 100.0;
  double low = -100.0;
  double high = 100.0;
  std::size_t age = 5;
  Marker lead = 0;
  std::uint64_t seed_offset = 0;
  std::vector<ScriptEntry> script;

  friend bool operator==(const StrategySpec&, const StrategySpec&) = default;
};

bool operator==(const ScriptRecord& a, const ScriptRecord& b);
bool operator==(const ScriptEntry& a, const ScriptEntry& b);

/// Private state of one byzantine node.
class AdversaryMemory {
 public:
  AdversaryMemory(NodeId self, std::size_t node_count, std::size_t history_depth);

  NodeId self() const noexcept { return self_; }

  /// Keeps the freshest verified record per origin and snapshots the result.
  void absorb(std::span<const InboundMessage> inbox, const Verifier& verifier);

  const std::vector<std::optional<StateRecord>>& freshest() const noexcept { return freshest_; }
  /// Snapshot taken `age` absorbs ago, clamped to the oldest kept.
  const std::vector<std::optional<StateRecord>>& snapshot(std::size_t age) const;

 private:
  NodeId self_;
  std::vector<std::optional<StateRecord>> freshest_;
  std::deque<std::vector<std::optional<StateRecord>>> history_;
  std::size_t depth_;
};

struct ByzantineCredentials {
  NodeId self = 0;
  const SigningKey* own_key = nullptr;
  const SignatureScheme* scheme = nullptr;
  std::uint64_t seed = 0;
};

using Outbox = std::vector<std::pair<NodeId, std::vector<StateRecord>>>;

/// Payloads for iteration t, one entry per out-neighbour that receives anything.
Outbox byzantine_outbox(const StrategySpec& spec, const AdversaryMemory& memory, Marker t,
                        std::span<const NodeId> neighbors, const ByzantineCredentials& creds);

}  // namespace relayabc
