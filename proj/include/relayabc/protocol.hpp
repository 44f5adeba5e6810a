#pragma once

// Honest-node state machine: signed relay of per-origin records, freshest
// marker wins, trimmed-mean update once t >= D.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "relayabc/auth.hpp"
#include "relayabc/graph.hpp"

namespace relayabc {

/// Marker of an initial state.
inline constexpr Marker kInitialMarker = -1;
/// Marker of a slot that never received a valid record (holds the default value).
inline constexpr Marker kNoRecord = -2;

struct StateRecord {
  NodeId origin = 0;
  double value = 0.0;
  Marker marker = kNoRecord;
  Signature signature;

  bool held() const noexcept { return marker != kNoRecord; }

  friend bool operator==(const StateRecord&, const StateRecord&) = default;
};

/// Wire size of one record: origin (4) + value (8) + marker (8) + signature.
std::size_t record_wire_bytes(const StateRecord& r);

/// Node `owner`'s latest record of every origin, indexed by origin id.
struct LocalView {
  NodeId owner = 0;
  std::vector<StateRecord> records;

  static LocalView initial(NodeId owner, std::size_t node_count, double own_value,
                           const Signature& own_signature, double default_value);

  const StateRecord& own() const { return records.at(owner); }

  /// Records actually held, in origin order. This is what an honest node broadcasts.
  std::vector<StateRecord> payload() const;

  friend bool operator==(const LocalView&, const LocalView&) = default;
};

struct TrimEntry {
  NodeId origin = 0;
  double value = 0.0;
  Marker marker = kNoRecord;

  friend bool operator==(const TrimEntry&, const TrimEntry&) = default;
};

/// Result of one trimmed-mean step. `sorted` holds all m entries ordered by
/// (value, origin); the first b form S, the last b form L, the middle m - 2b
/// survive.
struct TrimOutcome {
  std::vector<TrimEntry> sorted;
  std::size_t b = 0;
  /// Byzantine-origin survivors. Filled by the scheduler, which knows the labelling.
  std::size_t faulty_survivors = 0;
  double mean = 0.0;

  std::span<const TrimEntry> low() const { return {sorted.data(), b}; }
  std::span<const TrimEntry> survivors() const { return {sorted.data() + b, sorted.size() - 2 * b}; }
  std::span<const TrimEntry> high() const { return {sorted.data() + sorted.size() - b, b}; }
  bool survived(NodeId origin) const;

  friend bool operator==(const TrimOutcome&, const TrimOutcome&) = default;
};

/// Sorts `entries` by (value, origin), drops b from each end and averages the
/// rest in ascending order. Throws BadCardinality when m <= 2b and
/// std::invalid_argument for non-finite values.
TrimOutcome trim_entries(std::vector<TrimEntry> entries, std::size_t b);

/// Trimmed mean of plain values; entry k is treated as origin k.
double trimmed_mean(std::span<const double> values, std::size_t b);

struct InboundMessage {
  NodeId sender = 0;
  std::vector<StateRecord> records;
};

struct MergeStats {
  std::size_t accepted = 0;
  std::size_t bad_signature = 0;
  std::size_t bad_marker = 0;
  std::size_t bad_value = 0;

  std::size_t rejected() const noexcept { return bad_signature + bad_marker + bad_value; }

  friend bool operator==(const MergeStats&, const MergeStats&) = default;
};

/// Adopts, for every slot except the owner's, the verified record with the
/// highest marker in [-1, t). Equal markers keep the current record; among
/// equally fresh incoming candidates the smallest (value bits, signature)
/// wins, so inbox order never matters. Messages from senders not in
/// `allowed_senders` (when given) are ignored.
LocalView merge_views(const LocalView& current, std::span<const InboundMessage> incoming, Marker t,
                      const Verifier& verifier, MergeStats* stats = nullptr,
                      const std::vector<NodeId>* allowed_senders = nullptr);

struct HonestStepResult {
  LocalView merged;                  // after merge, before the own update
  LocalView view;                    // after the own update
  std::vector<StateRecord> broadcast;  // payload sent at iteration t + 1
  std::optional<TrimOutcome> trim;   // set iff t >= D
  MergeStats stats;
};

struct StepContext {
  Marker t = 0;
  std::size_t D = 1;
  std::size_t b = 0;
  const KeyRing* keys = nullptr;
  const std::vector<NodeId>* allowed_senders = nullptr;
};

/// One iteration of the honest protocol for `node`.
HonestStepResult step_honest_node(const LocalView& node, std::span<const InboundMessage> inbox,
                                  const StepContext& ctx);

}  // namespace relayabc
