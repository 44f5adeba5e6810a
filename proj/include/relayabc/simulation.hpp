#pragma once

// Lockstep scheduler. Iteration t: every node sends, all messages are
// delivered, then every honest node merges and (t >= D) updates. Honest nodes
// send one payload to all out-neighbours; byzantine nodes may tailor theirs.

#include <cstddef>
#include <filesystem>
#include <optional>
#include <vector>

#include "relayabc/adversary.hpp"
#include "relayabc/protocol.hpp"
#include "relayabc/scenario.hpp"

namespace relayabc {

struct NodeStep {
  NodeId node = 0;                  // original id
  std::size_t honest_index = 0;
  LocalView view;                   // after merge, before the own update
  std::optional<TrimOutcome> trim;  // set iff t >= D
  double value = 0.0;               // own state after the iteration
  Marker marker = kInitialMarker;
  MergeStats stats;

  friend bool operator==(const NodeStep&, const NodeStep&) = default;
};

struct ByzantineSend {
  NodeId node = 0;
  Outbox outbox;

  friend bool operator==(const ByzantineSend&, const ByzantineSend&) = default;
};

struct IterationRecord {
  Marker t = 0;
  std::vector<NodeStep> honest;  // by honest index
  std::vector<ByzantineSend> byzantine;
  std::size_t bytes = 0;  // total payload bytes sent this iteration

  friend bool operator==(const IterationRecord&, const IterationRecord&) = default;
};

struct SimulationTrace {
  Scenario scenario;
  std::vector<IterationRecord> iterations;

  std::size_t h() const noexcept { return scenario.h(); }
  std::size_t D() const noexcept { return scenario.D; }
  /// State of honest index k after iteration t; t = -1 gives the initial value.
  double state(Marker t, std::size_t k) const;
  /// Honest states after iteration t.
  std::vector<double> states(Marker t) const;
};

SimulationTrace run_simulation(const Scenario& scenario);
/// Validates first; throws ConfigInvalid.
SimulationTrace run_simulation(const ScenarioConfig& config);

// Trace persistence: JSON lines. A header line echoes the config, then one
// line per (iteration, honest node), one per byzantine send set, one summary
// per iteration, and an end marker. Missing end marker or any unparsable line
// raises TraceCorrupt.
void write_trace(const SimulationTrace& trace, const std::filesystem::path& path);
SimulationTrace read_trace(const std::filesystem::path& path);

/// `iteration,node_0,...,node_{h-1}` with shortest round-trip decimal values.
void write_values_csv(const SimulationTrace& trace, const std::filesystem::path& path);

}  // namespace relayabc
