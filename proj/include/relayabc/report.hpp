#pragma once

// Run and analysis report documents.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "relayabc/analysis.hpp"
#include "relayabc/simulation.hpp"

namespace relayabc {

struct PhaseResult {
  std::size_t phase = 0;
  StochasticityReport stochasticity;
  bool stochastic = false;
  double equation_error = 0.0;
  bool exact = false;
  StructureCheck diagonal;
  StructureCheck propagation;
  StructureCheck support;
  bool convex = false;
  std::size_t case2_rows = 0;
};

struct DominancePair {
  std::size_t earlier = 0;  // phase p; the product is M[p+1] * M[p]
  std::optional<std::uint64_t> reduced_graph;
};

struct ScramblingResult {
  bool ran = false;
  std::string note;
  std::size_t window = 0;
  std::size_t windows_checked = 0;
  std::size_t windows_with_column = 0;
  std::optional<std::size_t> first_failure;  // first phase of the window
  std::vector<std::optional<std::size_t>> columns;  // per checked window
};

struct AnalysisReport {
  ConstructionMode mode = ConstructionMode::TraceMarkers;
  double threshold = 0.0;
  std::vector<PhaseResult> phases;
  std::vector<DominancePair> dominance;
  ScramblingResult scrambling;
  double reconstruction_error = 0.0;
  std::vector<std::string> notes;

  bool all_exact() const;
  bool all_stochastic() const;
};

/// Builds every analyzable phase matrix and runs the structural checks
/// selected in `options`. `matrices`, when given, receives the built matrices.
AnalysisReport analyze_trace(const SimulationTrace& trace, const AnalysisOptions& options,
                             std::vector<TransitionMatrix>* matrices = nullptr);

/// Window for the scrambling check: 2rD+1, or nullopt if r overflows.
std::optional<std::size_t> scrambling_window(std::size_t h, std::size_t b, std::size_t D);

/// Products of consecutive windows M[s+W-1] ... M[s], evolution order.
ScramblingResult scrambling_check(std::span<const TransitionMatrix> matrices, std::size_t window,
                                  std::size_t max_windows, double threshold);

struct RunReport {
  std::string scenario;
  std::uint64_t seed = 0;
  std::size_t m = 0, b = 0, h = 0, D = 0, T = 0;
  double convergence_threshold = 0.0;
  std::vector<double> spreads;
  std::optional<std::size_t> converged_at;
  double final_spread = 0.0;
  double validity_tolerance = 0.0;
  std::size_t validity_violations = 0;
  std::size_t forgery_intrusions = 0;
  std::size_t marker_regressions = 0;
  bool windowed_spread_monotone = false;
  std::vector<std::size_t> bytes;
  std::size_t total_bytes = 0;
  MergeStats rejections;
  std::optional<AnalysisReport> analysis;

  bool valid() const { return validity_violations == 0; }
};

inline constexpr double kValidityTolerance = 1e-12;

RunReport make_run_report(const SimulationTrace& trace);

nlohmann::json to_json(const AnalysisReport& report);
nlohmann::json to_json(const RunReport& report);

/// Pretty-printed JSON with a trailing newline. Throws IoFailure.
void write_json(const nlohmann::json& doc, const std::filesystem::path& path);
/// Shortest round-trip decimals, one row per line. Throws IoFailure.
void write_matrix_csv(const Matrix& m, const std::filesystem::path& path);

}  // namespace relayabc
