// Acceptance run: one PASS/FAIL line per criterion, exit 1 if any fails.

#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "relayabc/analysis.hpp"
#include "relayabc/harness.hpp"
#include "relayabc/reduced_graph.hpp"
#include "relayabc/report.hpp"
#include "relayabc/simulation.hpp"
#include "support.hpp"

using namespace relayabc;
namespace fs = std::filesystem;

namespace {

constexpr double kSpreadTarget = 1e-6;
constexpr double kExactTol = 1e-9;
constexpr double kRowSumTol = 1e-12;
constexpr double kNegTol = -1e-15;
constexpr double kPositive = 1e-12;
constexpr double kRunSeconds = 5.0;
constexpr double kScramblingSeconds = 10.0;

int failures = 0;

void report(int n, bool ok, const std::string& detail) {
  std::printf("criterion %2d: %s  %s\n", n, ok ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct Run {
  std::string label;
  SimulationTrace trace;
  double seconds = 0;
  std::vector<TransitionMatrix> matrices;
};

Run simulate(const std::string& label, const ScenarioConfig& c) {
  const auto t0 = std::chrono::steady_clock::now();
  Run r{label, run_simulation(c), 0, {}};
  r.seconds = seconds_since(t0);
  return r;
}

void build_matrices(Run& r) {
  for (auto p : analyzable_phases(r.trace)) r.matrices.push_back(construct_phase_matrix(r.trace, p));
}

std::optional<std::size_t> first_below(const std::vector<double>& spreads, double thr) {
  for (std::size_t t = 0; t < spreads.size(); ++t)
    if (spreads[t] < thr) return t;
  return std::nullopt;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

ScenarioConfig with_strategy(ScenarioConfig c, StrategyKind kind) {
  for (auto& [id, spec] : c.strategies) {
    spec = StrategySpec{};
    spec.kind = kind;
    spec.lead = 2;
  }
  c.name += std::string("_") + std::string(strategy_name(kind));
  return c;
}

std::size_t mutation_false_accepts(SchemeKind kind) {
  const std::size_t n = 6;
  const KeyRing ring(kind, n, 99);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> val(-1e6, 1e6);
  std::size_t bad = 0;
  for (int k = 0; k < 1000; ++k) {
    const auto origin = static_cast<NodeId>(rng() % n);
    const double value = val(rng);
    const Marker marker = static_cast<Marker>(rng() % 5000) - 1;
    const auto sig = ring.sign(origin, value, marker);
    if (!ring.verifier().verify(origin, value, marker, sig)) ++bad;
    const auto other = static_cast<NodeId>((origin + 1 + rng() % (n - 1)) % n);
    double flipped = std::bit_cast<double>(std::bit_cast<std::uint64_t>(value) ^ (1ull << (rng() % 64)));
    if (std::isnan(flipped)) flipped = std::nextafter(value, 0.0);
    std::vector<std::uint8_t> bytes(sig.bytes().begin(), sig.bytes().end());
    bytes[rng() % bytes.size()] ^= static_cast<std::uint8_t>(1u << (rng() % 8));
    bad += ring.verifier().verify(other, value, marker, sig);
    bad += ring.verifier().verify(origin, flipped, marker, sig);
    bad += ring.verifier().verify(origin, value, marker + 1 + static_cast<Marker>(rng() % 10), sig);
    bad += ring.verifier().verify(origin, value, marker, Signature(bytes));
  }
  return bad;
}

}  // namespace

int main() {
  std::size_t validity_total = 0;

  // 1. Convergence on the complete graph, default adversary plus every other strategy.
  std::vector<Run> c1;
  c1.push_back(simulate("constant_extreme", scenario_preset("complete_h4_b1")));
  for (auto k : {StrategyKind::Silent, StrategyKind::RandomEquivocate, StrategyKind::ReplayStale,
                 StrategyKind::ForgeAttempt, StrategyKind::FutureMarker})
    c1.push_back(simulate(std::string(strategy_name(k)), with_strategy(scenario_preset("complete_h4_b1"), k)));
  {
    bool ok = true;
    std::ostringstream d;
    for (const auto& r : c1) {
      const auto at = first_below(spread_series(r.trace), kSpreadTarget);
      const bool good = at && *at < 500 && r.seconds < kRunSeconds;
      ok = ok && good;
      d << r.label << "=" << (at ? std::to_string(*at) : "none") << "(" << r.seconds << "s) ";
      validity_total += validity_violations(r.trace, 0.0);
    }
    report(1, ok, "spread<1e-6 at iteration: " + d.str());
  }

  // 2. Validity across a 30-cell sweep and every run in this binary.
  {
    const auto dir = fixtures::temp_dir("acceptance_sweep");
    std::ofstream(dir / "template.json") << config_to_json(scenario_preset("complete_h4_b1")).dump(2);
    nlohmann::json grid{{"format_version", kFormatVersion},
                        {"seeds", {1, 2, 3, 4, 5, 6, 7, 8, 9, 10}},
                        {"strategies", {"constant_extreme", "random_equivocate", "forge_attempt"}}};
    std::ofstream(dir / "grid.json") << grid.dump();
    std::ostringstream out, err;
    const int rc = cmd_sweep(dir / "template.json", dir / "grid.json", dir / "out", 4, out, err);
    const auto csv = slurp(dir / "out" / "summary.csv");
    std::size_t valid_cells = 0, pos = 0;
    while ((pos = csv.find(",valid\n", pos)) != std::string::npos) {
      ++valid_cells;
      ++pos;
    }
    fs::remove_all(dir);
    report(2, rc == kExitOk && valid_cells == 30 && validity_total == 0,
           "sweep exit=" + std::to_string(rc) + " valid cells=" + std::to_string(valid_cells) +
               "/30, violations in criterion-1 runs=" + std::to_string(validity_total));
  }

  // 3. Convergence on the cycle with one honest in-neighbour per node.
  Run c3 = simulate("honest_cycle", scenario_preset("honest_cycle_h4_b1"));
  {
    const auto at = first_below(spread_series(c3.trace), kSpreadTarget);
    const auto viol = validity_violations(c3.trace, 0.0);
    report(3, at && *at < 2000 && viol == 0,
           "spread<1e-6 at iteration " + (at ? std::to_string(*at) : std::string("none")) +
               ", validity violations=" + std::to_string(viol));
  }

  // 4. Phase equation exactness.
  {
    double worst = 0;
    std::size_t phases = 0;
    auto check = [&](Run& r) {
      build_matrices(r);
      for (const auto& tm : r.matrices) {
        worst = std::max(worst, verify_phase_equation(r.trace, tm.phase, tm.values));
        ++phases;
      }
    };
    for (auto& r : c1) check(r);
    check(c3);
    std::ostringstream d;
    d << "max error " << worst << " over " << phases << " phases";
    report(4, worst < kExactTol && phases > 0, d.str());
  }

  // 6 first, so its matrices join the stochasticity sweep.
  Run c6 = simulate("complete_h3", [] {
    auto c = scenario_preset("complete_h3_b1_scrambling");
    c.T = 200;
    return c;
  }());
  ScramblingResult scr;
  double c6_seconds = 0;
  {
    const auto t0 = std::chrono::steady_clock::now();
    build_matrices(c6);
    const auto w = scrambling_window(3, 1, c6.trace.D());
    if (w) scr = scrambling_check(c6.matrices, *w, c6.matrices.size(), kPositive);
    c6_seconds = c6.seconds + seconds_since(t0);
  }

  // 5. Stochasticity of every matrix built above.
  {
    double worst_sum = 0, min_entry = 0;
    std::size_t count = 0;
    auto scan = [&](const Run& r) {
      for (const auto& tm : r.matrices) {
        const auto s = stochasticity(tm.values);
        worst_sum = std::max(worst_sum, s.max_row_sum_error);
        min_entry = std::min(min_entry, s.min_entry);
        ++count;
      }
    };
    for (const auto& r : c1) scan(r);
    scan(c3);
    scan(c6);
    std::ostringstream d;
    d << count << " matrices, max |row sum - 1| " << worst_sum << ", min entry " << min_entry;
    report(5, worst_sum <= kRowSumTol && min_entry >= kNegTol && count > 0, d.str());
  }

  {
    std::ostringstream d;
    d << "window " << scr.window << ", " << scr.windows_with_column << "/" << scr.windows_checked
      << " windows with a positive column, " << c6_seconds << "s";
    report(6, scr.ran && scr.window == 17 && scr.windows_checked > 0 && scr.windows_with_column == scr.windows_checked &&
                  c6_seconds < kScramblingSeconds,
           d.str());
  }

  // 7. Every reduced graph has a source; consecutive phase blocks dominate a reduced graph.
  {
    bool graphs_ok = true;
    std::ostringstream d;
    for (auto [h, b] : {std::pair<std::size_t, std::size_t>{3, 1}, {4, 1}, {5, 2}}) {
      std::ostringstream out, err;
      const int rc = cmd_graphs(h, b, kDefaultReducedGraphCap, out, err);
      graphs_ok = graphs_ok && rc == kExitOk;
      d << "graphs(" << h << "," << b << ")=" << (rc == kExitOk ? "sourced" : "exit " + std::to_string(rc)) << " ";
    }
    const ReducedGraphSpace space(4, 1);
    std::size_t pairs = 0, matched = 0;
    d << "pairs dominating a reduced graph:";
    for (const auto& r : c1) {
      std::size_t run_matched = 0;
      for (std::size_t k = 0; k + 1 < r.matrices.size(); ++k)
        run_matched += block_dominates_reduced_graph(r.matrices[k + 1].values, r.matrices[k].values, space, kPositive)
                           .has_value();
      const std::size_t run_pairs = r.matrices.empty() ? 0 : r.matrices.size() - 1;
      d << " " << r.label << "=" << run_matched << "/" << run_pairs;
      pairs += run_pairs;
      matched += run_matched;
    }
    report(7, graphs_ok && pairs > 0 && matched == pairs, d.str());
  }

  // 8. Forged records never enter an honest view; signatures reject mutations.
  {
    std::size_t intrusions = 0, runs = 0;
    for (const auto& name : scenario_preset_names()) {
      auto c = with_strategy(scenario_preset(name), StrategyKind::ForgeAttempt);
      c.T = std::min<std::size_t>(c.T, 500);
      intrusions += forgery_intrusions(run_simulation(c));
      ++runs;
    }
    for (const auto& r : c1)
      if (r.label == "forge_attempt") intrusions += forgery_intrusions(r.trace);
    const auto accepts = mutation_false_accepts(SchemeKind::KeyedHash) + mutation_false_accepts(SchemeKind::Ed25519);
    report(8, intrusions == 0 && accepts == 0,
           "forged records in honest views=" + std::to_string(intrusions) + " over " + std::to_string(runs + 1) +
               " runs, mutation false accepts=" + std::to_string(accepts));
  }

  // 9. Worked matrix examples.
  {
    const Matrix m{{0, 1, 2}, {3, 4, 5}, {6, 7, 8}};
    const bool splice_ok = matrix_splice(m, 0, 1, 0, 1) == Matrix{{0, 1}, {3, 4}};
    const auto diag = check_diagonal_property(fixtures::diagonal_sample(), 3, kPositive);
    const bool diag_ok = std::all_of(diag.begin(), diag.end(), [](bool b) { return b; });
    const std::vector<Matrix> one{fixtures::zm_sample()};
    const auto col = product_nonzero_column(one, 3, kPositive);
    report(9, splice_ok && diag_ok && col == 4u,
           std::string("splice ") + (splice_ok ? "ok" : "wrong") + ", diagonal " + (diag_ok ? "ok" : "rejected") +
               ", positive column " + (col ? std::to_string(*col) : "none"));
  }

  // 10. Byte-identical artifacts on repeated runs.
  {
    bool ok = true;
    std::ostringstream d;
    const auto dir = fixtures::temp_dir("acceptance_det");
    for (const auto& name : scenario_preset_names()) {
      std::ostringstream out, err;
      const int a = cmd_run(scenario_preset(name), dir / (name + "_a"), out, err);
      const int b = cmd_run(scenario_preset(name), dir / (name + "_b"), out, err);
      const bool same = a == kExitOk && b == kExitOk &&
                        slurp(dir / (name + "_a") / "trace.jsonl") == slurp(dir / (name + "_b") / "trace.jsonl") &&
                        slurp(dir / (name + "_a") / "report.json") == slurp(dir / (name + "_b") / "report.json");
      ok = ok && same;
      d << name << "=" << (same ? "identical" : "differs") << " ";
    }
    fs::remove_all(dir);
    report(10, ok, d.str());
  }

  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
