#include "relayabc/report.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>

#include "relayabc/errors.hpp"

namespace relayabc {

using nlohmann::json;

bool AnalysisReport::all_exact() const {
  return std::all_of(phases.begin(), phases.end(), [](const PhaseResult& p) { return p.exact; });
}

bool AnalysisReport::all_stochastic() const {
  return std::all_of(phases.begin(), phases.end(), [](const PhaseResult& p) { return p.stochastic; });
}

std::optional<std::size_t> scrambling_window(std::size_t h, std::size_t b, std::size_t D) {
  const auto r = ReducedGraphSpace(h, b).count();
  if (!r) return std::nullopt;
  const std::uint64_t limit = (std::uint64_t{1} << 40);
  if (*r > limit / (2 * D)) return std::nullopt;
  return static_cast<std::size_t>(2 * *r * D + 1);
}

ScramblingResult scrambling_check(std::span<const TransitionMatrix> matrices, std::size_t window,
                                  std::size_t max_windows, double threshold) {
  ScramblingResult out;
  out.window = window;
  if (window == 0 || matrices.size() < window) {
    out.note = "fewer phase matrices than the window";
    return out;
  }
  out.ran = true;
  const std::size_t available = matrices.size() - window + 1;
  const std::size_t count = std::min(available, max_windows);
  if (count < available) out.note = "checked the first " + std::to_string(count) + " of " + std::to_string(available) + " windows";
  const std::size_t h = matrices.front().h;
  std::vector<Matrix> ms(window);
  for (std::size_t s = 0; s < count; ++s) {
    for (std::size_t k = 0; k < window; ++k) ms[k] = matrices[s + window - 1 - k].values;
    const auto col = product_nonzero_column(ms, h, threshold);
    out.columns.push_back(col);
    ++out.windows_checked;
    if (col) {
      ++out.windows_with_column;
    } else if (!out.first_failure) {
      out.first_failure = matrices[s].phase;
    }
  }
  return out;
}

AnalysisReport analyze_trace(const SimulationTrace& trace, const AnalysisOptions& options,
                             std::vector<TransitionMatrix>* matrices) {
  AnalysisReport rep;
  rep.mode = options.mode;
  rep.threshold = options.positivity_threshold;
  const double thr = options.positivity_threshold;
  const auto phases = analyzable_phases(trace);
  if (phases.empty()) {
    rep.notes.push_back("no analyzable phase");
    return rep;
  }

  std::vector<TransitionMatrix> built;
  built.reserve(phases.size());
  for (auto p : phases) built.push_back(construct_phase_matrix(trace, p, options.mode));

  for (const auto& tm : built) {
    PhaseResult r;
    r.phase = tm.phase;
    r.stochasticity = stochasticity(tm.values);
    r.stochastic = r.stochasticity.max_row_sum_error <= options.row_sum_tolerance &&
                   r.stochasticity.min_entry >= -options.negative_tolerance;
    r.equation_error = verify_phase_equation(trace, tm.phase, tm.values);
    r.exact = r.equation_error < options.exactness_tolerance;
    r.diagonal = diagonal_structure(tm, thr);
    r.propagation = first_row_propagation(tm, thr);
    r.support = origin_support(tm, trace.scenario.b(), thr);
    r.convex = rows_are_convex_on(tm.values, phase_vector(trace, tm.phase - 1), options.exactness_tolerance);
    r.case2_rows = static_cast<std::size_t>(
        std::count_if(tm.rows.begin(), tm.rows.end(), [](const RowInfo& i) { return i.case_tag == 2; }));
    rep.phases.push_back(r);
  }
  rep.reconstruction_error = reconstruction_error(trace, built);

  const std::size_t h = trace.h();
  const std::size_t b = trace.scenario.b();
  if (options.dominance_pairs && h >= 2 * b + 1) {
    const ReducedGraphSpace space(h, b);
    for (std::size_t k = 0; k + 1 < built.size(); ++k) {
      rep.dominance.push_back({built[k].phase, block_dominates_reduced_graph(built[k + 1].values, built[k].values, space, thr)});
    }
  }

  if (options.scrambling) {
    std::optional<std::size_t> window = options.scrambling_window;
    if (*window == 0) window = scrambling_window(h, b, trace.D());
    if (!window) {
      rep.scrambling.note = "window 2rD+1 does not fit";
    } else {
      rep.scrambling = scrambling_check(built, *window, options.scrambling_max_windows, thr);
    }
  }

  if (matrices) *matrices = std::move(built);
  return rep;
}

RunReport make_run_report(const SimulationTrace& trace) {
  const auto& s = trace.scenario;
  RunReport rep;
  rep.scenario = s.config.name;
  rep.seed = s.config.seed;
  rep.m = s.m();
  rep.b = s.b();
  rep.h = s.h();
  rep.D = s.D;
  rep.T = s.config.T;
  rep.convergence_threshold = s.config.convergence_threshold;
  rep.spreads = spread_series(trace);
  for (std::size_t t = 0; t < rep.spreads.size(); ++t) {
    if (rep.spreads[t] < rep.convergence_threshold) {
      rep.converged_at = t;
      break;
    }
  }
  rep.final_spread = rep.spreads.empty() ? spread(s.initial) : rep.spreads.back();
  rep.validity_tolerance = kValidityTolerance;
  rep.validity_violations = validity_violations(trace, kValidityTolerance);
  rep.forgery_intrusions = forgery_intrusions(trace);
  rep.marker_regressions = marker_regressions(trace);
  const auto windowed = windowed_spread_series(trace);
  rep.windowed_spread_monotone = true;
  for (std::size_t t = 1; t < windowed.size(); ++t) {
    if (windowed[t] > windowed[t - 1] + kValidityTolerance) rep.windowed_spread_monotone = false;
  }
  for (const auto& it : trace.iterations) {
    rep.bytes.push_back(it.bytes);
    rep.total_bytes += it.bytes;
    for (const auto& ns : it.honest) {
      rep.rejections.accepted += ns.stats.accepted;
      rep.rejections.bad_signature += ns.stats.bad_signature;
      rep.rejections.bad_marker += ns.stats.bad_marker;
      rep.rejections.bad_value += ns.stats.bad_value;
    }
  }
  if (s.config.analysis.enabled) rep.analysis = analyze_trace(trace, s.config.analysis);
  return rep;
}

namespace {

json check_json(const StructureCheck& c) {
  return {{"rows_checked", c.rows_checked}, {"violations", c.violations},
          {"unconditional_violations", c.unconditional_violations}};
}

json optional_json(const auto& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

json to_json(const AnalysisReport& r) {
  json phases = json::array();
  for (const auto& p : r.phases) {
    phases.push_back({{"phase", p.phase},
                      {"max_row_sum_error", p.stochasticity.max_row_sum_error},
                      {"min_entry", p.stochasticity.min_entry},
                      {"stochastic", p.stochastic},
                      {"equation_error", p.equation_error},
                      {"exact", p.exact},
                      {"diagonal", check_json(p.diagonal)},
                      {"first_row_propagation", check_json(p.propagation)},
                      {"origin_support", check_json(p.support)},
                      {"convex", p.convex},
                      {"case2_rows", p.case2_rows}});
  }
  json pairs_doc = json::array();
  std::size_t matched = 0;
  for (const auto& l : r.dominance) {
    pairs_doc.push_back({{"phases", {l.earlier, l.earlier + 1}}, {"reduced_graph", optional_json(l.reduced_graph)}});
    matched += l.reduced_graph ? 1 : 0;
  }
  json columns = json::array();
  for (const auto& c : r.scrambling.columns) columns.push_back(optional_json(c));
  return {{"format_version", kFormatVersion},
          {"kind", "analysis_report"},
          {"mode", r.mode == ConstructionMode::TraceMarkers ? "trace_markers" : "honest_distance"},
          {"positivity_threshold", r.threshold},
          {"exact", r.all_exact()},
          {"stochastic", r.all_stochastic()},
          {"reconstruction_error", r.reconstruction_error},
          {"phases", phases},
          {"reduced_graph_pairs", {{"checked", r.dominance.size()}, {"matched", matched}, {"pairs", pairs_doc}}},
          {"scrambling",
           {{"ran", r.scrambling.ran},
            {"note", r.scrambling.note},
            {"window", r.scrambling.window},
            {"windows_checked", r.scrambling.windows_checked},
            {"windows_with_column", r.scrambling.windows_with_column},
            {"first_failure", optional_json(r.scrambling.first_failure)},
            {"columns", columns}}},
          {"notes", r.notes}};
}

json to_json(const RunReport& r) {
  return {{"format_version", kFormatVersion},
          {"kind", "run_report"},
          {"scenario", r.scenario},
          {"seed", r.seed},
          {"m", r.m},
          {"b", r.b},
          {"h", r.h},
          {"D", r.D},
          {"T", r.T},
          {"convergence_threshold", r.convergence_threshold},
          {"converged_at", optional_json(r.converged_at)},
          {"final_spread", r.final_spread},
          {"validity",
           {{"valid", r.valid()}, {"violations", r.validity_violations}, {"tolerance", r.validity_tolerance}}},
          {"forgery_intrusions", r.forgery_intrusions},
          {"marker_regressions", r.marker_regressions},
          {"windowed_spread_monotone", r.windowed_spread_monotone},
          {"rejections",
           {{"accepted", r.rejections.accepted},
            {"bad_signature", r.rejections.bad_signature},
            {"bad_marker", r.rejections.bad_marker},
            {"bad_value", r.rejections.bad_value}}},
          {"bytes", {{"total", r.total_bytes}, {"per_iteration", r.bytes}}},
          {"spread_series", r.spreads},
          {"analysis", r.analysis ? to_json(*r.analysis) : json(nullptr)}};
}

void write_json(const json& doc, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoFailure("cannot write " + path.string());
  out << doc.dump(2) << '\n';
  if (!out) throw IoFailure("write failed for " + path.string());
}

void write_matrix_csv(const Matrix& m, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoFailure("cannot write " + path.string());
  char buf[64];
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) {
      if (c) out << ',';
      auto res = std::to_chars(buf, buf + sizeof buf, m(r, c));
      out.write(buf, res.ptr - buf);
    }
    out << '\n';
  }
  if (!out) throw IoFailure("write failed for " + path.string());
}

}  // namespace relayabc
