#include <charconv>
#include <fstream>
#include <string>

#include "json.hpp"
#include "relayabc/errors.hpp"
#include "relayabc/simulation.hpp"

namespace relayabc {

using nlohmann::json;

namespace {

json record_to_json(const StateRecord& r) { return json::array({r.origin, r.value, r.marker, r.signature.to_hex()}); }

StateRecord record_from_json(const json& j) {
  return StateRecord{j.at(0).get<NodeId>(), j.at(1).get<double>(), j.at(2).get<Marker>(),
                     Signature::from_hex(j.at(3).get<std::string>())};
}

json records_to_json(const std::vector<StateRecord>& records) {
  json out = json::array();
  for (const auto& r : records) out.push_back(record_to_json(r));
  return out;
}

std::vector<StateRecord> records_from_json(const json& j) {
  std::vector<StateRecord> out;
  for (const auto& r : j) out.push_back(record_from_json(r));
  return out;
}

json trim_to_json(const TrimOutcome& trim) {
  json sorted = json::array();
  for (const auto& e : trim.sorted) sorted.push_back({e.origin, e.value, e.marker});
  return {{"b", trim.b}, {"f", trim.faulty_survivors}, {"mean", trim.mean}, {"sorted", sorted}};
}

TrimOutcome trim_from_json(const json& j) {
  TrimOutcome trim;
  trim.b = j.at("b").get<std::size_t>();
  trim.faulty_survivors = j.at("f").get<std::size_t>();
  trim.mean = j.at("mean").get<double>();
  for (const auto& e : j.at("sorted")) {
    trim.sorted.push_back({e.at(0).get<NodeId>(), e.at(1).get<double>(), e.at(2).get<Marker>()});
  }
  if (trim.sorted.size() <= 2 * trim.b) throw TraceCorrupt("trim outcome with too few entries");
  return trim;
}

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace

void write_trace(const SimulationTrace& trace, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoFailure("cannot write " + path.string());
  const auto& s = trace.scenario;
  json header = {{"kind", "header"},
                 {"format_version", kFormatVersion},
                 {"config", config_to_json(s.config)},
                 {"m", s.m()},
                 {"b", s.b()},
                 {"h", s.h()},
                 {"D", s.D},
                 {"honest_ids", s.honest.to_original},
                 {"byzantine_ids", s.network.byzantine_ids()},
                 {"initial", s.initial}};
  out << header.dump() << '\n';
  for (const auto& it : trace.iterations) {
    for (const auto& ns : it.honest) {
      json line = {{"kind", "node"},
                   {"t", it.t},
                   {"node", ns.node},
                   {"k", ns.honest_index},
                   {"view", records_to_json(ns.view.records)},
                   {"trim", ns.trim ? trim_to_json(*ns.trim) : json(nullptr)},
                   {"value", ns.value},
                   {"marker", ns.marker},
                   {"stats", {ns.stats.accepted, ns.stats.bad_signature, ns.stats.bad_marker, ns.stats.bad_value}}};
      out << line.dump() << '\n';
    }
    for (const auto& send : it.byzantine) {
      json sends = json::array();
      for (const auto& [to, payload] : send.outbox) sends.push_back({to, records_to_json(payload)});
      out << json{{"kind", "byz"}, {"t", it.t}, {"node", send.node}, {"out", sends}}.dump() << '\n';
    }
    out << json{{"kind", "iter"}, {"t", it.t}, {"bytes", it.bytes}}.dump() << '\n';
  }
  out << json{{"kind", "end"}, {"iterations", trace.iterations.size()}}.dump() << '\n';
  if (!out) throw IoFailure("write failed for " + path.string());
}

SimulationTrace read_trace(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoFailure("cannot read " + path.string());
  SimulationTrace trace;
  std::string line;
  std::size_t line_no = 0;
  bool ended = false;
  try {
    if (!std::getline(in, line)) throw TraceCorrupt("empty trace");
    ++line_no;
    const json header = json::parse(line);
    if (header.at("kind") != "header") throw TraceCorrupt("first line is not a header");
    if (header.at("format_version").get<int>() != kFormatVersion) throw TraceCorrupt("unsupported format_version");
    trace.scenario = validate(config_from_json(header.at("config")));
    trace.scenario.initial = header.at("initial").get<std::vector<double>>();
    if (trace.scenario.D != header.at("D").get<std::size_t>() || trace.scenario.initial.size() != trace.h()) {
      throw TraceCorrupt("header disagrees with its config");
    }
    const std::size_t h = trace.h();
    while (std::getline(in, line)) {
      ++line_no;
      if (ended) throw TraceCorrupt("content after end marker");
      const json j = json::parse(line);
      const std::string kind = j.at("kind").get<std::string>();
      if (kind == "end") {
        if (j.at("iterations").get<std::size_t>() != trace.iterations.size()) throw TraceCorrupt("iteration count mismatch");
        ended = true;
        continue;
      }
      const Marker t = j.at("t").get<Marker>();
      if (trace.iterations.empty() || trace.iterations.back().t != t) {
        if (t != static_cast<Marker>(trace.iterations.size())) throw TraceCorrupt("non-contiguous iteration");
        if (!trace.iterations.empty() && trace.iterations.back().honest.size() != h) {
          throw TraceCorrupt("iteration missing honest records");
        }
        trace.iterations.emplace_back();
        trace.iterations.back().t = t;
      }
      auto& it = trace.iterations.back();
      if (kind == "node") {
        NodeStep ns;
        ns.node = j.at("node").get<NodeId>();
        ns.honest_index = j.at("k").get<std::size_t>();
        if (ns.honest_index != it.honest.size() || trace.scenario.honest.to_original.at(ns.honest_index) != ns.node) {
          throw TraceCorrupt("honest records out of order");
        }
        ns.view.owner = ns.node;
        ns.view.records = records_from_json(j.at("view"));
        if (ns.view.records.size() != trace.scenario.m()) throw TraceCorrupt("view of wrong size");
        if (!j.at("trim").is_null()) ns.trim = trim_from_json(j.at("trim"));
        ns.value = j.at("value").get<double>();
        ns.marker = j.at("marker").get<Marker>();
        const auto& st = j.at("stats");
        ns.stats = {st.at(0).get<std::size_t>(), st.at(1).get<std::size_t>(), st.at(2).get<std::size_t>(),
                    st.at(3).get<std::size_t>()};
        it.honest.push_back(std::move(ns));
      } else if (kind == "byz") {
        ByzantineSend send;
        send.node = j.at("node").get<NodeId>();
        for (const auto& s : j.at("out")) send.outbox.emplace_back(s.at(0).get<NodeId>(), records_from_json(s.at(1)));
        it.byzantine.push_back(std::move(send));
      } else if (kind == "iter") {
        it.bytes = j.at("bytes").get<std::size_t>();
      } else {
        throw TraceCorrupt("unknown line kind " + kind);
      }
    }
  } catch (const TraceCorrupt& e) {
    throw TraceCorrupt(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
  } catch (const std::exception& e) {
    throw TraceCorrupt(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
  }
  if (!ended) throw TraceCorrupt(path.string() + ": truncated (no end marker)");
  if (!trace.iterations.empty() && trace.iterations.back().honest.size() != trace.h()) {
    throw TraceCorrupt(path.string() + ": last iteration missing honest records");
  }
  return trace;
}

void write_values_csv(const SimulationTrace& trace, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoFailure("cannot write " + path.string());
  out << "iteration";
  for (std::size_t k = 0; k < trace.h(); ++k) out << ",node_" << k;
  out << '\n';
  for (const auto& it : trace.iterations) {
    out << it.t;
    for (const auto& ns : it.honest) out << ',' << format_double(ns.value);
    out << '\n';
  }
  if (!out) throw IoFailure("write failed for " + path.string());
}

}  // namespace relayabc
