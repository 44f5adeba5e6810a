#include "relayabc/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <bit>
#include <set>
#include <tuple>
#include <string>
#include <utility>

#include "relayabc/errors.hpp"
#include "relayabc/kernels.hpp"

namespace relayabc {

namespace {

std::int64_t honest_index_of(std::span<const std::int64_t> to_honest, NodeId origin) {
  return origin < to_honest.size() ? to_honest[origin] : -1;
}

}  // namespace

GRow build_g_row(const TrimOutcome& outcome, std::span<const std::int64_t> to_honest, std::size_t node) {
  std::size_t h = 0;
  for (auto v : to_honest) h += v >= 0 ? 1 : 0;
  const std::size_t m = outcome.sorted.size();
  const double share = 1.0 / static_cast<double>(m - 2 * outcome.b);

  GRow g;
  g.node = node;
  g.weights.assign(h, 0.0);
  g.markers.assign(h, kNoRecord);
  for (const auto& e : outcome.sorted) {
    const auto k = honest_index_of(to_honest, e.origin);
    if (k < 0) continue;
    if (e.marker == kNoRecord) {
      throw InconsistentTrace("honest origin " + std::to_string(e.origin) + " has no record in a trimmed view");
    }
    g.markers[static_cast<std::size_t>(k)] = e.marker;
  }

  std::vector<TrimEntry> faulty;
  for (const auto& e : outcome.survivors()) {
    const auto k = honest_index_of(to_honest, e.origin);
    if (k >= 0) {
      g.weights[static_cast<std::size_t>(k)] += share;
    } else {
      faulty.push_back(e);
    }
  }
  if (faulty.empty()) return g;

  g.case_tag = 2;
  const TrimEntry* s = nullptr;
  for (const auto& e : outcome.low()) {
    if (honest_index_of(to_honest, e.origin) >= 0) s = &e;  // last honest entry = largest
  }
  const TrimEntry* l = nullptr;
  for (const auto& e : outcome.high()) {
    if (honest_index_of(to_honest, e.origin) >= 0) {
      l = &e;
      break;
    }
  }
  if (s == nullptr || l == nullptr) {
    throw InconsistentTrace("faulty survivor without honest entries on both trimmed sides");
  }
  const auto ks = static_cast<std::size_t>(to_honest[s->origin]);
  const auto kl = static_cast<std::size_t>(to_honest[l->origin]);
  g.s_star = ks;
  g.l_star = kl;
  for (const auto& x : faulty) {
    if (x.value < s->value || x.value > l->value) {
      throw InconsistentTrace("faulty survivor " + std::to_string(x.value) + " outside [" + std::to_string(s->value) +
                              ", " + std::to_string(l->value) + "]");
    }
    const double gamma = l->value == s->value ? 1.0 : (l->value - x.value) / (l->value - s->value);
    g.gammas.push_back(gamma);
    g.weights[ks] += gamma * share;
    g.weights[kl] += (1.0 - gamma) * share;
  }
  return g;
}

std::vector<std::size_t> analyzable_phases(const SimulationTrace& trace) {
  std::vector<std::size_t> phases;
  const std::size_t last = trace.iterations.size() / trace.D();
  for (std::size_t p = 2; p <= last; ++p) phases.push_back(p);
  return phases;
}

std::vector<double> phase_vector(const SimulationTrace& trace, std::size_t phase) {
  const std::size_t h = trace.h();
  const std::size_t D = trace.D();
  if (phase * D > trace.iterations.size()) {
    throw IndexOutOfRange("phase " + std::to_string(phase) + " extends past the trace");
  }
  std::vector<double> v(h * D);
  for (std::size_t q = 0; q < D; ++q) {
    const Marker t = phase == 0 ? kInitialMarker : static_cast<Marker>((phase - 1) * D + q);
    for (std::size_t i = 0; i < h; ++i) v[q * h + i] = trace.state(t, i);
  }
  return v;
}

TransitionMatrix construct_phase_matrix(const SimulationTrace& trace, std::size_t phase, ConstructionMode mode) {
  if (phase < 2) throw PhaseTooEarly("phase " + std::to_string(phase) + " has no trimmed-mean updates");
  const std::size_t h = trace.h();
  const std::size_t D = trace.D();
  if (phase * D > trace.iterations.size()) {
    throw IndexOutOfRange("phase " + std::to_string(phase) + " extends past the trace");
  }
  const auto& honest = trace.scenario.honest;
  const Marker start = static_cast<Marker>((phase - 1) * D);
  const Marker prev_start = start - static_cast<Marker>(D);
  DistanceMatrix dist;
  if (mode == ConstructionMode::HonestDistance) dist = shortest_distances(honest.graph);

  TransitionMatrix tm;
  tm.phase = phase;
  tm.h = h;
  tm.D = D;
  tm.values = Matrix(h * D, h * D);
  tm.rows.resize(h * D);
  Matrix& M = tm.values;

  for (std::size_t q = 0; q < D; ++q) {
    const Marker it = start + static_cast<Marker>(q);
    for (std::size_t i = 0; i < h; ++i) {
      const std::size_t row = q * h + i;
      const NodeStep& step = trace.iterations.at(static_cast<std::size_t>(it)).honest.at(i);
      if (!step.trim) throw InconsistentTrace("no trim outcome at iteration " + std::to_string(it));
      const GRow g = build_g_row(*step.trim, honest.to_honest, i);

      for (std::size_t k = 0; k < h; ++k) {
        const double w = g.weights[k];
        if (w == 0.0) continue;
        Marker mu = g.markers[k];
        if (mode == ConstructionMode::HonestDistance) {
          mu = k == i ? it - 1 : it - static_cast<Marker>(dist[k][i]);
        }
        if (mu < start) {
          std::size_t block;
          if (mu == kInitialMarker || (phase == 2 && mu >= 0)) {
            // Phase 1 states equal the initial values, so any previous-phase
            // column of origin k is equivalent; use the last block.
            block = mu == kInitialMarker ? D - 1 : static_cast<std::size_t>(mu - prev_start);
            if (phase != 2) {
              throw InconsistentTrace("initial-marker record of origin " + std::to_string(k) + " in phase " +
                                      std::to_string(phase));
            }
          } else if (mu >= prev_start) {
            block = static_cast<std::size_t>(mu - prev_start);
          } else {
            throw InconsistentTrace("record of origin " + std::to_string(k) + " with marker " + std::to_string(mu) +
                                    " older than the previous phase at iteration " + std::to_string(it));
          }
          M(row, block * h + k) += w;
        } else {
          if (mu >= it) throw InconsistentTrace("record marker not older than its use");
          const std::size_t src = static_cast<std::size_t>(mu - start) * h + k;
          const Matrix& cm = M;
          kernels::axpy(w, cm.row(src), M.row(row));
        }
      }

      RowInfo& info = tm.rows[row];
      info.node = i;
      info.q = q;
      info.iteration = it;
      info.case_tag = g.case_tag;
      info.self_survived = step.trim->survived(step.node);
      info.self_chain = info.self_survived && (q == 0 || tm.rows[row - h].self_chain);
    }
  }
  return tm;
}

double verify_phase_equation(const SimulationTrace& trace, std::size_t phase, const Matrix& m) {
  const auto prev = phase_vector(trace, phase - 1);
  const auto cur = phase_vector(trace, phase);
  const auto predicted = multiply(m, prev);
  return kernels::max_abs_diff(cur, predicted);
}

StochasticityReport stochasticity(const Matrix& m) {
  StochasticityReport rep;
  rep.min_entry = m.data().empty() ? 0.0 : kernels::min_max(m.data()).min;
  for (std::size_t r = 0; r < m.rows(); ++r) {
    rep.max_row_sum_error = std::max(rep.max_row_sum_error, std::fabs(kernels::sum(m.row(r)) - 1.0));
  }
  return rep;
}

bool check_row_stochastic(const Matrix& m, double tol) {
  if (m.rows() == 0) return false;
  const auto rep = stochasticity(m);
  return rep.max_row_sum_error <= tol && rep.min_entry >= -tol;
}

std::vector<bool> check_diagonal_property(const Matrix& m, std::size_t h, double threshold) {
  const std::size_t n = m.rows();
  std::vector<bool> pass(n, false);
  if (h == 0 || n % h != 0 || m.cols() != n) return pass;
  const std::size_t last_block = n - h;
  for (std::size_t r = 0; r < n; ++r) pass[r] = m(r, last_block + r % h) > threshold;
  return pass;
}

StructureCheck diagonal_structure(const TransitionMatrix& tm, double threshold) {
  StructureCheck out;
  const auto pass = check_diagonal_property(tm.values, tm.h, threshold);
  for (std::size_t r = 0; r < pass.size(); ++r) {
    if (!pass[r]) ++out.unconditional_violations;
    if (!tm.rows[r].self_chain) continue;
    ++out.rows_checked;
    if (!pass[r]) ++out.violations;
  }
  return out;
}

StructureCheck first_row_propagation(const TransitionMatrix& tm, double threshold) {
  StructureCheck out;
  const Matrix& M = tm.values;
  for (std::size_t z = tm.h; z < M.rows(); ++z) {
    const std::size_t i = z % tm.h;
    bool ok = true;
    for (std::size_t j = 0; j < M.cols(); ++j) {
      if (M(i, j) > threshold && !(M(z, j) > 0.0)) ok = false;
    }
    if (!ok) ++out.unconditional_violations;
    if (!tm.rows[z].self_chain) continue;
    ++out.rows_checked;
    if (!ok) ++out.violations;
  }
  return out;
}

std::vector<std::size_t> row_origin_support(const Matrix& m, std::size_t h, double threshold) {
  std::vector<std::size_t> counts(m.rows(), 0);
  for (std::size_t r = 0; r < m.rows(); ++r) {
    std::vector<bool> seen(h, false);
    for (std::size_t c = 0; c < m.cols(); ++c) {
      if (m(r, c) > threshold) seen[c % h] = true;
    }
    counts[r] = static_cast<std::size_t>(std::count(seen.begin(), seen.end(), true));
  }
  return counts;
}

StructureCheck origin_support(const TransitionMatrix& tm, std::size_t b, double threshold) {
  StructureCheck out;
  const auto counts = row_origin_support(tm.values, tm.h, threshold);
  const std::size_t need = tm.h - b;
  for (std::size_t r = 0; r < counts.size(); ++r) {
    if (counts[r] < need) ++out.unconditional_violations;
    if (!tm.rows[r].self_chain) continue;
    ++out.rows_checked;
    if (counts[r] < need) ++out.violations;
  }
  return out;
}

bool rows_are_convex_on(const Matrix& m, std::span<const double> x, double tol) {
  const auto [lo, hi] = kernels::min_max(x);
  for (double y : multiply(m, x)) {
    if (y < lo - tol || y > hi + tol) return false;
  }
  return true;
}

std::optional<std::uint64_t> block_dominates_reduced_graph(const Matrix& later, const Matrix& earlier,
                                                           const ReducedGraphSpace& space, double threshold) {
  const std::size_t h = space.h();
  const Matrix block = bottom_block(multiply(later, earlier), h);
  std::vector<std::vector<std::uint8_t>> pattern(h, std::vector<std::uint8_t>(h, 0));
  for (std::size_t r = 0; r < h; ++r) {
    for (std::size_t c = 0; c < h; ++c) pattern[r][c] = block(r, c) > threshold ? 1 : 0;
  }
  return space.first_dominated_by(pattern);
}

std::optional<std::size_t> product_nonzero_column(std::span<const Matrix> ms, std::size_t h, double threshold) {
  return positive_column(product(ms), threshold, h);
}

double spread(std::span<const double> values) {
  if (values.empty()) return 0.0;
  const auto [lo, hi] = kernels::min_max(values);
  return hi - lo;
}

double reconstruction_error(const SimulationTrace& trace, std::span<const TransitionMatrix> matrices) {
  if (matrices.empty()) return 0.0;
  std::vector<double> v = phase_vector(trace, matrices.front().phase - 1);
  double worst = 0.0;
  for (const auto& tm : matrices) {
    v = multiply(tm.values, v);
    worst = std::max(worst, kernels::max_abs_diff(v, phase_vector(trace, tm.phase)));
  }
  return worst;
}

}  // namespace relayabc

namespace relayabc {

std::vector<double> spread_series(const SimulationTrace& trace) {
  std::vector<double> out;
  out.reserve(trace.iterations.size());
  for (const auto& it : trace.iterations) {
    std::vector<double> v;
    v.reserve(it.honest.size());
    for (const auto& ns : it.honest) v.push_back(ns.value);
    out.push_back(spread(v));
  }
  return out;
}

std::vector<double> windowed_spread_series(const SimulationTrace& trace) {
  const auto D = static_cast<Marker>(trace.D());
  std::vector<double> out;
  out.reserve(trace.iterations.size());
  for (Marker t = 0; t < static_cast<Marker>(trace.iterations.size()); ++t) {
    std::vector<double> v;
    for (Marker s = std::max<Marker>(-1, t - D + 1); s <= t; ++s) {
      const auto st = trace.states(s);
      v.insert(v.end(), st.begin(), st.end());
    }
    out.push_back(spread(v));
  }
  return out;
}

std::size_t validity_violations(const SimulationTrace& trace, double tol) {
  const auto& init = trace.scenario.initial;
  if (init.empty()) return 0;
  const auto [lo, hi] = kernels::min_max(init);
  std::size_t bad = 0;
  for (const auto& it : trace.iterations) {
    for (const auto& ns : it.honest) {
      if (!(ns.value >= lo - tol && ns.value <= hi + tol)) ++bad;
    }
  }
  return bad;
}

std::size_t forgery_intrusions(const SimulationTrace& trace) {
  const auto& honest = trace.scenario.honest;
  std::set<std::tuple<NodeId, std::uint64_t, Marker>> logged;
  auto bits = [](double v) { return std::bit_cast<std::uint64_t>(v); };
  for (std::size_t k = 0; k < trace.h(); ++k) {
    logged.emplace(honest.to_original[k], bits(trace.scenario.initial[k]), kInitialMarker);
  }
  for (const auto& it : trace.iterations) {
    for (const auto& ns : it.honest) {
      if (ns.marker != kInitialMarker) logged.emplace(ns.node, bits(ns.value), ns.marker);
    }
  }
  std::size_t bad = 0;
  for (const auto& it : trace.iterations) {
    for (const auto& ns : it.honest) {
      for (const auto& r : ns.view.records) {
        if (!r.held() || honest.to_honest.at(r.origin) < 0) continue;
        if (!logged.contains({r.origin, bits(r.value), r.marker})) ++bad;
      }
    }
  }
  return bad;
}

std::size_t marker_regressions(const SimulationTrace& trace) {
  std::size_t bad = 0;
  for (std::size_t t = 1; t < trace.iterations.size(); ++t) {
    const auto& prev = trace.iterations[t - 1].honest;
    const auto& cur = trace.iterations[t].honest;
    for (std::size_t k = 0; k < cur.size(); ++k) {
      for (std::size_t j = 0; j < cur[k].view.records.size(); ++j) {
        if (cur[k].view.records[j].marker < prev[k].view.records[j].marker) ++bad;
      }
    }
  }
  return bad;
}

}  // namespace relayabc
