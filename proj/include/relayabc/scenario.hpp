#pragma once

// Scenario documents: topology, initial values, adversaries, horizon.
//
//   { "format_version": 1, "name": "...",
//     "graph": {"preset": "complete", "h": 4, "b": 1}
//            | {"m": 5, "byzantine": [4], "edges": [[0, 1], ...]},
//     "initial_values": [0, 1, 2, 3],
//     "b_strategy": {"4": {"kind": "constant_extreme", "value": 100}},
//     "D": 1 | "auto", "T": 500, "default_value": 0.0, "seed": 1,
//     "strict_out_neighbors": false, "signature_scheme": "keyed_hash",
//     "convergence_threshold": 1e-6,
//     "analysis": {...} }

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "relayabc/adversary.hpp"
#include "relayabc/auth.hpp"
#include "relayabc/graph.hpp"

namespace relayabc {

inline constexpr int kFormatVersion = 1;

struct GraphSpec {
  /// "complete", "honest_cycle_plus_byz" or "bidirectional_path_plus_byz";
  /// empty for an explicit edge list.
  std::string preset;
  std::size_t h = 0;
  std::size_t b = 0;
  DirectedNetwork network;  // explicit form only

  DirectedNetwork resolve() const;
};

/// How survivor records are mapped onto previous-phase columns.
enum class ConstructionMode {
  TraceMarkers,    // actual (origin, marker) of each survivor
  HonestDistance,  // marker inferred as iteration - dist(origin, node) over the honest subgraph
};

struct AnalysisOptions {
  bool enabled = true;
  ConstructionMode mode = ConstructionMode::TraceMarkers;
  double positivity_threshold = 1e-12;
  double exactness_tolerance = 1e-9;
  double row_sum_tolerance = 1e-12;
  double negative_tolerance = 1e-15;
  std::uint64_t reduced_graph_cap = 1'000'000;
  bool dominance_pairs = true;
  bool scrambling = true;
  /// 0 = use the 2rD+1 bound.
  std::size_t scrambling_window = 0;
  std::size_t scrambling_max_windows = 256;

  friend bool operator==(const AnalysisOptions&, const AnalysisOptions&) = default;
};

struct ScenarioConfig {
  std::string name = "scenario";
  GraphSpec graph;
  std::vector<double> initial_values;  // per honest id, ascending; empty = drawn from seed
  std::map<NodeId, StrategySpec> strategies;
  std::optional<std::size_t> D;  // nullopt = honest diameter
  std::size_t T = 0;
  double default_value = 0.0;
  std::uint64_t seed = 0;
  bool strict_out_neighbors = false;
  SchemeKind scheme = SchemeKind::KeyedHash;
  double convergence_threshold = 1e-6;
  AnalysisOptions analysis;
};

/// A validated scenario with everything derived from the config.
struct Scenario {
  ScenarioConfig config;
  DirectedNetwork network;
  HonestSubgraph honest;
  std::size_t diameter = 0;
  std::size_t D = 1;
  std::vector<double> initial;  // per honest index
  std::map<NodeId, StrategySpec> strategies;  // every byzantine node present

  std::size_t m() const noexcept { return network.node_count(); }
  std::size_t b() const noexcept { return network.byzantine_count(); }
  std::size_t h() const noexcept { return honest.to_original.size(); }
};

/// Checks every precondition; throws ConfigInvalid naming the violated one.
Scenario validate(const ScenarioConfig& config);

/// Throws ConfigInvalid(Malformed) on schema errors. Relative "table_path"
/// entries of scripted strategies resolve against `base_dir`.
ScenarioConfig config_from_json(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});
nlohmann::json config_to_json(const ScenarioConfig& config);

nlohmann::json strategy_to_json(const StrategySpec& spec);
StrategySpec strategy_from_json(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});

nlohmann::json graph_to_json(const GraphSpec& spec);
GraphSpec graph_from_json(const nlohmann::json& doc);

/// Throws IoFailure when unreadable, ConfigInvalid when malformed.
ScenarioConfig load_config(const std::filesystem::path& path);

/// complete_h4_b1, honest_cycle_h4_b1, path_h5_b1, complete_h3_b1_scrambling.
std::vector<std::string> scenario_preset_names();
/// Throws std::invalid_argument for unknown names.
ScenarioConfig scenario_preset(const std::string& name);

}  // namespace relayabc
