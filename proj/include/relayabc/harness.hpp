#pragma once

// Subcommand bodies for the relay_abc tool. Each returns the process exit
// status and reports progress and errors on the given streams.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"
#include "relayabc/scenario.hpp"

namespace relayabc {

enum ExitCode : int {
  kExitOk = 0,
  kExitCheckFailed = 1,
  kExitConfigError = 2,
  kExitIoError = 3,
};

/// Writes trace.jsonl, values.csv, report.json and timing.json into `out_dir`.
/// Exit 1 when an honest state leaves the initial range.
int cmd_run(const ScenarioConfig& config, const std::filesystem::path& out_dir, std::ostream& out, std::ostream& err);
int cmd_run(const std::filesystem::path& config_path, const std::filesystem::path& out_dir, std::ostream& out,
            std::ostream& err);

/// Writes analysis.json (and matrices/phase_<p>.csv when asked). Exit 1 when a
/// matrix fails exactness or stochasticity.
int cmd_analyze(const std::filesystem::path& trace_path, const std::filesystem::path& out_dir, bool export_matrices,
                std::ostream& out, std::ostream& err);

/// Enumerates every reduced graph for (h, b) and finds a source in each.
int cmd_graphs(std::size_t h, std::size_t b, std::uint64_t cap, std::ostream& out, std::ostream& err);

/// One configuration per grid cell: the cartesian product of the axes present
/// in `grid` ("seeds", "strategies", "initial_values", "graphs"), applied to
/// the template. Absent axes keep the template value; an empty axis yields no
/// cells.
std::vector<ScenarioConfig> expand_grid(const ScenarioConfig& base, const nlohmann::json& grid);

/// Runs every cell into out_dir/cell_<n>/ concurrently and writes summary.csv.
/// Cells with an invalid configuration are reported and skipped. Exit 1 when
/// any cell violates validity.
int cmd_sweep(const std::filesystem::path& template_path, const std::filesystem::path& grid_path,
              const std::filesystem::path& out_dir, std::size_t threads, std::ostream& out, std::ostream& err);

}  // namespace relayabc
