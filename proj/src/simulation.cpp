#include "relayabc/simulation.hpp"

#include <algorithm>
#include <stdexcept>

namespace relayabc {

double SimulationTrace::state(Marker t, std::size_t k) const {
  if (t < 0) return scenario.initial.at(k);
  return iterations.at(static_cast<std::size_t>(t)).honest.at(k).value;
}

std::vector<double> SimulationTrace::states(Marker t) const {
  std::vector<double> out(h());
  for (std::size_t k = 0; k < h(); ++k) out[k] = state(t, k);
  return out;
}

SimulationTrace run_simulation(const ScenarioConfig& config) { return run_simulation(validate(config)); }

SimulationTrace run_simulation(const Scenario& scenario) {
  const auto& net = scenario.network;
  const std::size_t m = scenario.m();
  const std::size_t h = scenario.h();
  const auto& honest_ids = scenario.honest.to_original;
  const KeyRing keys(scenario.config.scheme, m, scenario.config.seed);

  std::vector<LocalView> views;
  views.reserve(h);
  for (std::size_t k = 0; k < h; ++k) {
    const NodeId id = honest_ids[k];
    const double x = scenario.initial[k];
    views.push_back(LocalView::initial(id, m, x, keys.sign(id, x, kInitialMarker), scenario.config.default_value));
  }

  std::size_t depth = 1;
  for (const auto& [z, spec] : scenario.strategies) depth = std::max(depth, spec.age + 1);
  std::vector<AdversaryMemory> memories;
  std::vector<ByzantineCredentials> creds;
  for (const auto& [z, spec] : scenario.strategies) {
    memories.emplace_back(z, m, depth);
    creds.push_back({z, &keys.signing_key(z), &keys.scheme(), scenario.config.seed});
  }

  SimulationTrace trace;
  trace.scenario = scenario;
  trace.iterations.reserve(scenario.config.T);

  std::vector<std::vector<InboundMessage>> inbox(m);
  for (Marker t = 0; t < static_cast<Marker>(scenario.config.T); ++t) {
    IterationRecord rec;
    rec.t = t;
    for (auto& box : inbox) box.clear();

    std::vector<std::vector<StateRecord>> honest_payload(h);
    for (std::size_t k = 0; k < h; ++k) honest_payload[k] = views[k].payload();

    std::size_t zi = 0;
    std::vector<Outbox> byz_out(memories.size());
    for (const auto& [z, spec] : scenario.strategies) {
      byz_out[zi] = byzantine_outbox(spec, memories[zi], t, net.out_neighbors(z), creds[zi]);
      rec.byzantine.push_back({z, byz_out[zi]});
      ++zi;
    }

    // Inboxes fill in sender-id order.
    for (NodeId sender = 0; sender < m; ++sender) {
      if (!net.is_byzantine(sender)) {
        const auto& payload = honest_payload[static_cast<std::size_t>(scenario.honest.to_honest[sender])];
        std::size_t size = 0;
        for (const auto& r : payload) size += record_wire_bytes(r);
        for (NodeId to : net.out_neighbors(sender)) {
          inbox[to].push_back({sender, payload});
          rec.bytes += size;
        }
      } else {
        const auto it = std::find_if(rec.byzantine.begin(), rec.byzantine.end(),
                                     [sender](const ByzantineSend& s) { return s.node == sender; });
        for (const auto& [to, payload] : it->outbox) {
          if (!net.has_edge(sender, to)) continue;
          for (const auto& r : payload) rec.bytes += record_wire_bytes(r);
          inbox[to].push_back({sender, payload});
        }
      }
    }

    rec.honest.resize(h);
    for (std::size_t k = 0; k < h; ++k) {
      const NodeId id = honest_ids[k];
      StepContext ctx{t, scenario.D, scenario.b(), &keys,
                      scenario.config.strict_out_neighbors ? &net.out_neighbors(id) : nullptr};
      auto step = step_honest_node(views[k], inbox[id], ctx);
      NodeStep& ns = rec.honest[k];
      ns.node = id;
      ns.honest_index = k;
      ns.view = std::move(step.merged);
      ns.trim = std::move(step.trim);
      if (ns.trim) {
        const auto surv = ns.trim->survivors();
        ns.trim->faulty_survivors = static_cast<std::size_t>(
            std::count_if(surv.begin(), surv.end(), [&](const TrimEntry& e) { return net.is_byzantine(e.origin); }));
      }
      ns.value = step.view.own().value;
      ns.marker = step.view.own().marker;
      ns.stats = step.stats;
      views[k] = std::move(step.view);
    }

    zi = 0;
    for (const auto& [z, spec] : scenario.strategies) {
      memories[zi].absorb(inbox[z], keys.verifier());
      ++zi;
    }
    trace.iterations.push_back(std::move(rec));
  }
  return trace;
}

}  // namespace relayabc
