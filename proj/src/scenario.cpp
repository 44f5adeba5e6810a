#include "relayabc/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "relayabc/errors.hpp"

namespace relayabc {

using nlohmann::json;

namespace {

[[noreturn]] void malformed(const std::string& what) { throw ConfigInvalid(Assumption::Malformed, what); }

template <typename T>
T get_or(const json& doc, const char* key, T fallback) {
  if (!doc.contains(key) || doc.at(key).is_null()) return fallback;
  return doc.at(key).get<T>();
}

std::vector<ScriptEntry> script_from_json(const json& table) {
  if (!table.is_object() || !table.contains("entries") || !table.at("entries").is_array()) {
    malformed("payload table needs an \"entries\" array");
  }
  std::vector<ScriptEntry> entries;
  for (const auto& e : table.at("entries")) {
    ScriptEntry entry;
    entry.t = e.at("t").get<Marker>();
    if (e.contains("to") && !(e.at("to").is_string() && e.at("to").get<std::string>() == "*")) {
      entry.to = e.at("to").get<NodeId>();
    }
    entry.relay = get_or(e, "relay", false);
    for (const auto& r : e.value("records", json::array())) {
      entry.records.push_back({r.at("origin").get<NodeId>(), r.at("value").get<double>(), r.at("marker").get<Marker>()});
    }
    entries.push_back(std::move(entry));
  }
  return entries;
}

json script_to_json(const std::vector<ScriptEntry>& script) {
  json entries = json::array();
  for (const auto& e : script) {
    json records = json::array();
    for (const auto& r : e.records) records.push_back({{"origin", r.origin}, {"value", r.value}, {"marker", r.marker}});
    json item = {{"t", e.t}, {"relay", e.relay}, {"records", records}};
    item["to"] = e.to ? json(*e.to) : json("*");
    entries.push_back(std::move(item));
  }
  return {{"format_version", kFormatVersion}, {"entries", entries}};
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoFailure("cannot read " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    malformed(path.string() + ": " + e.what());
  }
}

std::uint64_t mix(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::vector<double> seeded_initial_values(std::size_t h, std::uint64_t seed) {
  std::vector<double> values;
  std::set<double> seen;
  std::uint64_t state = mix(seed ^ 0x1A2B3C4DULL);
  while (values.size() < h) {
    state = mix(state);
    const double v = static_cast<double>(state >> 11) * 0x1.0p-53;
    if (seen.insert(v).second) values.push_back(v);
  }
  return values;
}

}  // namespace

DirectedNetwork GraphSpec::resolve() const {
  if (preset.empty()) return network;
  if (preset == "complete") return preset_complete(h, b);
  if (preset == "honest_cycle_plus_byz") return preset_honest_cycle_plus_byz(h, b);
  if (preset == "bidirectional_path_plus_byz") return preset_bidirectional_path_plus_byz(h, b);
  malformed("unknown graph preset: " + preset);
}

json graph_to_json(const GraphSpec& spec) {
  if (!spec.preset.empty()) return {{"preset", spec.preset}, {"h", spec.h}, {"b", spec.b}};
  json edges = json::array();
  for (auto [i, j] : spec.network.edges()) edges.push_back({i, j});
  return {{"m", spec.network.node_count()}, {"byzantine", spec.network.byzantine_ids()}, {"edges", edges}};
}

GraphSpec graph_from_json(const json& doc) {
  GraphSpec spec;
  try {
    if (doc.is_string()) malformed("graph preset needs h and b: use {\"preset\": ..., \"h\": ..., \"b\": ...}");
    if (doc.contains("preset")) {
      spec.preset = doc.at("preset").get<std::string>();
      spec.h = doc.at("h").get<std::size_t>();
      spec.b = doc.at("b").get<std::size_t>();
      if (spec.h == 0) malformed("graph preset needs h >= 1");
      spec.resolve();
      return spec;
    }
    const auto m = doc.at("m").get<std::size_t>();
    if (m == 0) malformed("graph needs m >= 1");
    spec.network = DirectedNetwork(m);
    for (const auto& z : doc.value("byzantine", json::array())) {
      const auto id = z.get<NodeId>();
      if (id >= m) malformed("byzantine id out of range: " + std::to_string(id));
      spec.network.set_byzantine(id);
    }
    for (const auto& e : doc.value("edges", json::array())) {
      if (!e.is_array() || e.size() != 2) malformed("edges must be [i, j] pairs");
      const auto i = e[0].get<NodeId>();
      const auto j = e[1].get<NodeId>();
      if (i >= m || j >= m) malformed("edge endpoint out of range");
      spec.network.add_edge(i, j);
    }
  } catch (const json::exception& e) {
    malformed(std::string("graph: ") + e.what());
  }
  return spec;
}

json strategy_to_json(const StrategySpec& spec) {
  json doc = {{"kind", strategy_name(spec.kind)}, {"seed_offset", spec.seed_offset}};
  switch (spec.kind) {
    case StrategyKind::Silent:
      break;
    case StrategyKind::ConstantExtreme:
    case StrategyKind::ForgeAttempt:
      doc["value"] = spec.value;
      break;
    case StrategyKind::RandomEquivocate:
      doc["low"] = spec.low;
      doc["high"] = spec.high;
      break;
    case StrategyKind::ReplayStale:
      doc["value"] = spec.value;
      doc["age"] = spec.age;
      break;
    case StrategyKind::FutureMarker:
      doc["value"] = spec.value;
      doc["lead"] = spec.lead;
      break;
    case StrategyKind::Scripted:
      doc["table"] = script_to_json(spec.script);
      break;
  }
  return doc;
}

StrategySpec strategy_from_json(const json& doc, const std::filesystem::path& base_dir) {
  StrategySpec spec;
  try {
    spec.kind = strategy_from_name(doc.at("kind").get<std::string>());
    spec.value = get_or(doc, "value", spec.value);
    spec.low = get_or(doc, "low", spec.low);
    spec.high = get_or(doc, "high", spec.high);
    spec.age = get_or(doc, "age", spec.age);
    spec.lead = get_or(doc, "lead", spec.lead);
    spec.seed_offset = get_or(doc, "seed_offset", spec.seed_offset);
    if (spec.kind == StrategyKind::Scripted) {
      if (doc.contains("table")) {
        spec.script = script_from_json(doc.at("table"));
      } else if (doc.contains("table_path")) {
        std::filesystem::path p = doc.at("table_path").get<std::string>();
        if (p.is_relative()) p = base_dir / p;
        spec.script = script_from_json(read_json_file(p));
      } else {
        malformed("scripted strategy needs \"table\" or \"table_path\"");
      }
    }
  } catch (const json::exception& e) {
    malformed(std::string("strategy: ") + e.what());
  } catch (const std::invalid_argument& e) {
    malformed(e.what());
  }
  if (!std::isfinite(spec.value) || !std::isfinite(spec.low) || !std::isfinite(spec.high) || spec.low > spec.high) {
    malformed("strategy parameters must be finite with low <= high");
  }
  return spec;
}

json config_to_json(const ScenarioConfig& c) {
  json strategies = json::object();
  for (const auto& [id, spec] : c.strategies) strategies[std::to_string(id)] = strategy_to_json(spec);
  const auto& a = c.analysis;
  json analysis = {
      {"enabled", a.enabled},
      {"construction", a.mode == ConstructionMode::TraceMarkers ? "trace_markers" : "honest_distance"},
      {"positivity_threshold", a.positivity_threshold},
      {"exactness_tolerance", a.exactness_tolerance},
      {"row_sum_tolerance", a.row_sum_tolerance},
      {"negative_tolerance", a.negative_tolerance},
      {"reduced_graph_cap", a.reduced_graph_cap},
      {"dominance_pairs", a.dominance_pairs},
      {"scrambling", a.scrambling},
      {"scrambling_window", a.scrambling_window},
      {"scrambling_max_windows", a.scrambling_max_windows},
  };
  return {
      {"format_version", kFormatVersion},
      {"name", c.name},
      {"graph", graph_to_json(c.graph)},
      {"initial_values", c.initial_values},
      {"b_strategy", strategies},
      {"D", c.D ? json(*c.D) : json("auto")},
      {"T", c.T},
      {"default_value", c.default_value},
      {"seed", c.seed},
      {"strict_out_neighbors", c.strict_out_neighbors},
      {"signature_scheme", scheme_name(c.scheme)},
      {"convergence_threshold", c.convergence_threshold},
      {"analysis", analysis},
  };
}

ScenarioConfig config_from_json(const json& doc, const std::filesystem::path& base_dir) {
  ScenarioConfig c;
  try {
    if (!doc.is_object()) malformed("scenario must be a JSON object");
    const int version = get_or(doc, "format_version", kFormatVersion);
    if (version != kFormatVersion) malformed("unsupported format_version " + std::to_string(version));
    c.name = get_or<std::string>(doc, "name", c.name);
    c.graph = graph_from_json(doc.at("graph"));
    c.initial_values = get_or(doc, "initial_values", std::vector<double>{});
    if (doc.contains("b_strategy")) {
      for (const auto& [key, spec] : doc.at("b_strategy").items()) {
        std::size_t pos = 0;
        const unsigned long id = std::stoul(key, &pos);
        if (pos != key.size()) malformed("b_strategy keys must be node ids");
        c.strategies[static_cast<NodeId>(id)] = strategy_from_json(spec, base_dir);
      }
    }
    if (doc.contains("D")) {
      const auto& d = doc.at("D");
      if (d.is_string()) {
        if (d.get<std::string>() != "auto") malformed("D must be an integer or \"auto\"");
      } else {
        c.D = d.get<std::size_t>();
      }
    }
    c.T = doc.at("T").get<std::size_t>();
    c.default_value = get_or(doc, "default_value", c.default_value);
    c.seed = get_or(doc, "seed", c.seed);
    c.strict_out_neighbors = get_or(doc, "strict_out_neighbors", c.strict_out_neighbors);
    if (doc.contains("signature_scheme")) c.scheme = scheme_from_name(doc.at("signature_scheme").get<std::string>());
    c.convergence_threshold = get_or(doc, "convergence_threshold", c.convergence_threshold);
    if (doc.contains("analysis")) {
      const auto& a = doc.at("analysis");
      auto& o = c.analysis;
      o.enabled = get_or(a, "enabled", o.enabled);
      const auto mode = get_or<std::string>(a, "construction", "trace_markers");
      if (mode == "trace_markers") {
        o.mode = ConstructionMode::TraceMarkers;
      } else if (mode == "honest_distance") {
        o.mode = ConstructionMode::HonestDistance;
      } else {
        malformed("unknown analysis construction: " + mode);
      }
      o.positivity_threshold = get_or(a, "positivity_threshold", o.positivity_threshold);
      o.exactness_tolerance = get_or(a, "exactness_tolerance", o.exactness_tolerance);
      o.row_sum_tolerance = get_or(a, "row_sum_tolerance", o.row_sum_tolerance);
      o.negative_tolerance = get_or(a, "negative_tolerance", o.negative_tolerance);
      o.reduced_graph_cap = get_or(a, "reduced_graph_cap", o.reduced_graph_cap);
      o.dominance_pairs = get_or(a, "dominance_pairs", o.dominance_pairs);
      o.scrambling = get_or(a, "scrambling", o.scrambling);
      o.scrambling_window = get_or(a, "scrambling_window", o.scrambling_window);
      o.scrambling_max_windows = get_or(a, "scrambling_max_windows", o.scrambling_max_windows);
    }
  } catch (const json::exception& e) {
    malformed(e.what());
  } catch (const std::invalid_argument& e) {
    malformed(e.what());
  } catch (const std::out_of_range& e) {
    malformed(e.what());
  }
  if (!std::isfinite(c.default_value)) malformed("default_value must be finite");
  for (double v : c.initial_values) {
    if (!std::isfinite(v)) malformed("initial values must be finite");
  }
  return c;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  return config_from_json(read_json_file(path), path.parent_path());
}

Scenario validate(const ScenarioConfig& config) {
  Scenario s;
  s.config = config;
  s.network = config.graph.resolve();
  const std::size_t m = s.network.node_count();
  const std::size_t b = s.network.byzantine_count();
  if (m == 0) malformed("graph has no nodes");
  if (3 * b >= m) {
    throw ConfigInvalid(Assumption::ByzantineFraction,
                        "b=" + std::to_string(b) + " is not strictly below m/3 for m=" + std::to_string(m));
  }
  s.honest = honest_subgraph(s.network);
  if (!strongly_connected(s.honest.graph)) {
    throw ConfigInvalid(Assumption::HonestConnectivity, "some honest node cannot reach another over honest edges");
  }
  s.diameter = diameter(s.honest.graph);
  s.D = config.D.value_or(std::max<std::size_t>(s.diameter, 1));
  if (s.D < s.diameter || s.D == 0) {
    throw ConfigInvalid(Assumption::DiameterBound, "D=" + std::to_string(s.D) + " but the honest diameter is " +
                                                       std::to_string(s.diameter) + " (and D must be >= 1)");
  }
  if (config.T < s.D) {
    throw ConfigInvalid(Assumption::Horizon, "T=" + std::to_string(config.T) + " < D=" + std::to_string(s.D));
  }
  const std::size_t h = s.h();
  if (config.initial_values.empty()) {
    s.initial = seeded_initial_values(h, config.seed);
  } else if (config.initial_values.size() != h) {
    malformed("expected " + std::to_string(h) + " initial values, got " + std::to_string(config.initial_values.size()));
  } else {
    s.initial = config.initial_values;
  }
  for (const auto& [id, spec] : config.strategies) {
    if (id >= m || !s.network.is_byzantine(id)) {
      malformed("b_strategy entry for non-byzantine node " + std::to_string(id));
    }
  }
  for (NodeId z : s.network.byzantine_ids()) {
    auto it = config.strategies.find(z);
    s.strategies[z] = it == config.strategies.end() ? StrategySpec{} : it->second;
  }
  if (!(config.convergence_threshold > 0.0)) malformed("convergence_threshold must be positive");
  return s;
}

std::vector<std::string> scenario_preset_names() {
  return {"complete_h4_b1", "honest_cycle_h4_b1", "path_h5_b1", "complete_h3_b1_scrambling"};
}

ScenarioConfig scenario_preset(const std::string& name) {
  ScenarioConfig c;
  c.name = name;
  c.seed = 1;
  StrategySpec extreme;
  extreme.kind = StrategyKind::ConstantExtreme;
  extreme.value = 100.0;
  if (name == "complete_h4_b1") {
    c.graph = {"complete", 4, 1, {}};
    c.initial_values = {0.0, 1.0, 2.0, 3.0};
    c.strategies[4] = extreme;
    c.D = 1;
    c.T = 500;
  } else if (name == "honest_cycle_h4_b1") {
    c.graph = {"honest_cycle_plus_byz", 4, 1, {}};
    c.initial_values = {0.0, 1.0, 2.0, 3.0};
    c.strategies[4] = extreme;
    c.T = 2000;
  } else if (name == "path_h5_b1") {
    StrategySpec eq;
    eq.kind = StrategyKind::RandomEquivocate;
    eq.low = -50.0;
    eq.high = 50.0;
    c.graph = {"bidirectional_path_plus_byz", 5, 1, {}};
    c.initial_values = {0.0, 1.0, 2.0, 3.0, 4.0};
    c.strategies[5] = eq;
    c.T = 2000;
  } else if (name == "complete_h3_b1_scrambling") {
    StrategySpec eq;
    eq.kind = StrategyKind::RandomEquivocate;
    eq.low = -10.0;
    eq.high = 10.0;
    c.graph = {"complete", 3, 1, {}};
    c.initial_values = {0.0, 1.0, 2.0};
    c.strategies[3] = eq;
    c.D = 1;
    c.T = 200;
  } else {
    throw std::invalid_argument("unknown scenario preset: " + name);
  }
  return c;
}

}  // namespace relayabc
