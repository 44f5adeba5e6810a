#pragma once

// Phase transition matrices rebuilt from a simulation trace, and the
// structural checks run against them.
//
// Phase p covers iterations [(p-1)D, pD). Entry q*h + i of the phase vector
// v[p] is honest node i's state after relative iteration q; v[0] is D copies
// of the initial states. The matrix M of phase p >= 2 satisfies
// v[p] = M * v[p-1] exactly (up to rounding).

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "relayabc/matrix.hpp"
#include "relayabc/reduced_graph.hpp"
#include "relayabc/simulation.hpp"

namespace relayabc {

/// Weights of one update over honest origins.
struct GRow {
  std::size_t node = 0;  // honest index of the updating node
  std::vector<double> weights;  // per honest origin, sums to 1
  std::vector<Marker> markers;  // marker of the record each weight refers to
  int case_tag = 1;             // 1: no faulty survivor, 2: at least one
  std::optional<std::size_t> s_star;  // honest index, Case 2 only
  std::optional<std::size_t> l_star;
  std::vector<double> gammas;  // one per faulty survivor, in sorted order
};

/// Splits the trimmed mean over honest origins. Each honest survivor gets
/// 1/(m-2b). A faulty survivor x (byzantine origin, including never-heard
/// default slots) is rewritten as gamma*s + (1-gamma)*l where s is the
/// largest honest value in the low trim set and l the smallest honest value
/// in the high trim set. Throws InconsistentTrace if that is impossible.
GRow build_g_row(const TrimOutcome& outcome, std::span<const std::int64_t> to_honest, std::size_t node);

struct RowInfo {
  std::size_t node = 0;  // honest index
  std::size_t q = 0;     // relative iteration within the phase
  Marker iteration = 0;
  int case_tag = 1;
  bool self_survived = false;  // own value among the survivors at this iteration
  bool self_chain = false;     // ... and at every earlier iteration of the phase
};

struct TransitionMatrix {
  std::size_t phase = 0;
  std::size_t h = 0;
  std::size_t D = 0;
  Matrix values;
  std::vector<RowInfo> rows;
};

/// Phases with a complete matrix in this trace: 2 .. floor(T / D).
std::vector<std::size_t> analyzable_phases(const SimulationTrace& trace);

/// Throws IndexOutOfRange when the phase is not fully inside the trace.
std::vector<double> phase_vector(const SimulationTrace& trace, std::size_t phase);

/// Rows are built in increasing index; a survivor produced earlier in the same
/// phase contributes its already-built row scaled by its weight. Throws
/// PhaseTooEarly for phase < 2.
TransitionMatrix construct_phase_matrix(const SimulationTrace& trace, std::size_t phase,
                                        ConstructionMode mode = ConstructionMode::TraceMarkers);

/// max |v[phase] - M * v[phase-1]|.
double verify_phase_equation(const SimulationTrace& trace, std::size_t phase, const Matrix& m);

struct StochasticityReport {
  double max_row_sum_error = 0.0;
  double min_entry = 0.0;
};

StochasticityReport stochasticity(const Matrix& m);
/// Row sums within 1 +- tol and no entry below -tol.
bool check_row_stochastic(const Matrix& m, double tol);

/// Per row t = k*h + i: entry (t, h(D-1) + i) > threshold.
std::vector<bool> check_diagonal_property(const Matrix& m, std::size_t h, double threshold);

struct StructureCheck {
  std::size_t rows_checked = 0;
  std::size_t violations = 0;        // among rows the property is asserted on
  std::size_t unconditional_violations = 0;  // over every row
};

/// Diagonal entries, asserted on rows whose node kept its own value through
/// the phase so far.
StructureCheck diagonal_structure(const TransitionMatrix& tm, double threshold);

/// If M(i, j) > threshold for i < h then M(z, j) > 0 for every later node-i row z,
/// asserted on rows with an unbroken self chain.
StructureCheck first_row_propagation(const TransitionMatrix& tm, double threshold);

/// Number of distinct origins (column mod h) holding an entry > threshold.
std::vector<std::size_t> row_origin_support(const Matrix& m, std::size_t h, double threshold);

/// Each row must reach at least h - b origins; asserted on rows with an
/// unbroken self chain.
StructureCheck origin_support(const TransitionMatrix& tm, std::size_t b, double threshold);

/// Every row applied to x lands in [min x, max x] (within tol).
bool rows_are_convex_on(const Matrix& m, std::span<const double> x, double tol);

/// P = later * earlier; the bottom-right h x h block is thresholded and the
/// smallest-index reduced graph it dominates (self-loops included) is returned.
std::optional<std::uint64_t> block_dominates_reduced_graph(const Matrix& later, const Matrix& earlier,
                                                           const ReducedGraphSpace& space, double threshold);

/// Multiplies in the given order and returns the first fully positive column,
/// searching the last h columns first.
std::optional<std::size_t> product_nonzero_column(std::span<const Matrix> ms, std::size_t h, double threshold);

double spread(std::span<const double> values);

/// Replays v[p] = M_p ... M_2 v[1] against the recorded phase vectors and
/// returns the largest deviation. `matrices` must be consecutive from phase 2.
double reconstruction_error(const SimulationTrace& trace, std::span<const TransitionMatrix> matrices);

// Trace-level checks.

/// Honest spread after each iteration.
std::vector<double> spread_series(const SimulationTrace& trace);

/// Entry t: spread over the honest states of iterations max(-1, t-D+1)..t,
/// with -1 standing for the initial values. Non-increasing for a genuine run.
std::vector<double> windowed_spread_series(const SimulationTrace& trace);

/// Honest states outside [min, max] of the honest initial values (widened by tol).
std::size_t validity_violations(const SimulationTrace& trace, double tol);

/// View records of honest origin whose (value, marker) that origin never produced.
std::size_t forgery_intrusions(const SimulationTrace& trace);

/// View slots whose marker went backwards between consecutive iterations.
std::size_t marker_regressions(const SimulationTrace& trace);

}  // namespace relayabc
