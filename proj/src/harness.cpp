#include "relayabc/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <fstream>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "relayabc/errors.hpp"
#include "relayabc/kernels.hpp"
#include "relayabc/reduced_graph.hpp"
#include "relayabc/report.hpp"
#include "relayabc/simulation.hpp"

namespace relayabc {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoFailure("cannot create directory " + dir.string());
}

std::string fmt_double(double v) {
  std::ostringstream s;
  s.precision(17);
  s << v;
  return s.str();
}

struct RunOutcome {
  RunReport report;
  bool ok = false;
};

RunOutcome run_to_dir(const Scenario& scenario, const fs::path& out_dir) {
  ensure_dir(out_dir);
  auto t0 = Clock::now();
  const SimulationTrace trace = run_simulation(scenario);
  const double sim_s = seconds_since(t0);

  t0 = Clock::now();
  RunReport report = make_run_report(trace);
  const double report_s = seconds_since(t0);

  t0 = Clock::now();
  write_trace(trace, out_dir / "trace.jsonl");
  write_values_csv(trace, out_dir / "values.csv");
  write_json(to_json(report), out_dir / "report.json");
  const double write_s = seconds_since(t0);

  write_json({{"format_version", kFormatVersion},
              {"kind", "timing"},
              {"kernel_backend", kernels::backend_name(kernels::active_backend())},
              {"simulate_seconds", sim_s},
              {"report_seconds", report_s},
              {"write_seconds", write_s}},
             out_dir / "timing.json");
  const bool ok = report.valid();
  return {std::move(report), ok};
}

}  // namespace

int cmd_run(const ScenarioConfig& config, const fs::path& out_dir, std::ostream& out, std::ostream& err) {
  try {
    const Scenario scenario = validate(config);
    const auto [report, ok] = run_to_dir(scenario, out_dir);
    out << scenario.config.name << ": converged_at="
        << (report.converged_at ? std::to_string(*report.converged_at) : std::string("none"))
        << " final_spread=" << fmt_double(report.final_spread) << " validity=" << (ok ? "ok" : "violated") << '\n';
    if (!ok) {
      err << "validity violated: " << report.validity_violations << " honest states left the initial range\n";
      return kExitCheckFailed;
    }
    return kExitOk;
  } catch (const ConfigInvalid& e) {
    err << "config invalid: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const IoFailure& e) {
    err << "i/o error: " << e.what() << '\n';
    return kExitIoError;
  } catch (const Error& e) {
    err << "check failed: " << e.what() << '\n';
    return kExitCheckFailed;
  }
}

int cmd_run(const fs::path& config_path, const fs::path& out_dir, std::ostream& out, std::ostream& err) {
  ScenarioConfig config;
  try {
    config = load_config(config_path);
  } catch (const ConfigInvalid& e) {
    err << "config invalid: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const IoFailure& e) {
    err << "i/o error: " << e.what() << '\n';
    return kExitIoError;
  }
  return cmd_run(config, out_dir, out, err);
}

int cmd_analyze(const fs::path& trace_path, const fs::path& out_dir, bool export_matrices, std::ostream& out,
                std::ostream& err) {
  try {
    const SimulationTrace trace = read_trace(trace_path);
    ensure_dir(out_dir);
    std::vector<TransitionMatrix> matrices;
    const AnalysisReport report = analyze_trace(trace, trace.scenario.config.analysis, &matrices);
    write_json(to_json(report), out_dir / "analysis.json");
    if (export_matrices) {
      ensure_dir(out_dir / "matrices");
      for (const auto& tm : matrices) {
        write_matrix_csv(tm.values, out_dir / "matrices" / ("phase_" + std::to_string(tm.phase) + ".csv"));
      }
    }
    for (const auto& n : report.notes) out << n << '\n';
    out << "phases=" << report.phases.size() << " exact=" << (report.all_exact() ? "yes" : "no")
        << " stochastic=" << (report.all_stochastic() ? "yes" : "no")
        << " reconstruction_error=" << fmt_double(report.reconstruction_error) << '\n';
    return report.all_exact() && report.all_stochastic() ? kExitOk : kExitCheckFailed;
  } catch (const TraceCorrupt& e) {
    err << "trace corrupt: " << e.what() << '\n';
    return kExitIoError;
  } catch (const IoFailure& e) {
    err << "i/o error: " << e.what() << '\n';
    return kExitIoError;
  } catch (const ConfigInvalid& e) {
    err << "config invalid: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const InconsistentTrace& e) {
    err << "inconsistent trace: " << e.what() << '\n';
    return kExitCheckFailed;
  }
}

int cmd_graphs(std::size_t h, std::size_t b, std::uint64_t cap, std::ostream& out, std::ostream& err) {
  try {
    const ReducedGraphSpace space(h, b);
    const auto graphs = space.enumerate(cap);
    std::map<NodeId, std::size_t> histogram;
    std::size_t failures = 0;
    for (const auto& g : graphs) {
      try {
        ++histogram[find_source_component(g)];
      } catch (const NoSource& e) {
        ++failures;
        err << "graph " << g.index << ": " << e.what() << '\n';
      }
    }
    out << "h=" << h << " b=" << b << " r=" << graphs.size() << '\n';
    for (const auto& [node, n] : histogram) out << "source " << node << ": " << n << '\n';
    out << (failures == 0 ? "all sourced" : std::to_string(failures) + " without a source") << '\n';
    return failures == 0 ? kExitOk : kExitCheckFailed;
  } catch (const std::invalid_argument& e) {
    err << "invalid (h, b): " << e.what() << '\n';
    return kExitConfigError;
  } catch (const TooLarge& e) {
    err << "too large: " << e.what() << '\n';
    return kExitConfigError;
  }
}

std::vector<ScenarioConfig> expand_grid(const ScenarioConfig& base, const json& grid) {
  if (!grid.is_object()) throw ConfigInvalid(Assumption::Malformed, "grid must be an object");
  if (grid.contains("format_version") && grid.at("format_version") != kFormatVersion) {
    throw ConfigInvalid(Assumption::Malformed, "unsupported grid format_version");
  }
  auto axis = [&](const char* key) -> std::optional<json> {
    if (!grid.contains(key)) return std::nullopt;
    const json& a = grid.at(key);
    if (!a.is_array()) throw ConfigInvalid(Assumption::Malformed, std::string(key) + " must be an array");
    return a;
  };
  const auto seeds = axis("seeds");
  const auto strategies = axis("strategies");
  const auto initials = axis("initial_values");
  const auto graphs = axis("graphs");
  if (!seeds && !strategies && !initials && !graphs) return {};

  std::vector<ScenarioConfig> cells{base};
  auto extend = [&](const std::optional<json>& values, auto apply) {
    if (!values) return;
    std::vector<ScenarioConfig> next;
    for (const auto& cell : cells) {
      for (const auto& v : *values) {
        ScenarioConfig c = cell;
        apply(c, v);
        next.push_back(std::move(c));
      }
    }
    cells = std::move(next);
  };
  try {
    extend(graphs, [](ScenarioConfig& c, const json& v) { c.graph = graph_from_json(v); });
    extend(initials, [](ScenarioConfig& c, const json& v) { c.initial_values = v.get<std::vector<double>>(); });
    extend(strategies, [](ScenarioConfig& c, const json& v) {
      const StrategySpec spec = strategy_from_json(v.is_string() ? json{{"kind", v}} : v);
      c.strategies.clear();
      std::vector<NodeId> byz;
      try {
        byz = c.graph.resolve().byzantine_ids();
      } catch (const std::exception&) {
        return;  // the cell fails validation on its own
      }
      for (auto id : byz) c.strategies[id] = spec;
    });
    extend(seeds, [](ScenarioConfig& c, const json& v) { c.seed = v.get<std::uint64_t>(); });
  } catch (const ConfigInvalid&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigInvalid(Assumption::Malformed, std::string("grid: ") + e.what());
  }
  for (std::size_t n = 0; n < cells.size(); ++n) cells[n].name = base.name + "_cell" + std::to_string(n);
  return cells;
}

int cmd_sweep(const fs::path& template_path, const fs::path& grid_path, const fs::path& out_dir, std::size_t threads,
              std::ostream& out, std::ostream& err) {
  std::vector<ScenarioConfig> cells;
  try {
    const ScenarioConfig base = load_config(template_path);
    std::ifstream in(grid_path, std::ios::binary);
    if (!in) throw IoFailure("cannot read " + grid_path.string());
    json grid;
    try {
      grid = json::parse(in);
    } catch (const json::exception& e) {
      throw ConfigInvalid(Assumption::Malformed, std::string("grid: ") + e.what());
    }
    cells = expand_grid(base, grid);
  } catch (const ConfigInvalid& e) {
    err << "config invalid: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const IoFailure& e) {
    err << "i/o error: " << e.what() << '\n';
    return kExitIoError;
  }
  if (cells.empty()) {
    out << "empty grid, nothing to run\n";
    return kExitOk;
  }

  struct Row {
    std::string scenario;
    std::uint64_t seed = 0;
    std::string converged_at;
    std::string final_spread;
    std::string validity;
    bool io_error = false;
  };
  std::vector<Row> rows(cells.size());
  std::atomic<std::size_t> next{0};
  std::mutex log_mutex;

  auto worker = [&] {
    for (std::size_t n = next++; n < cells.size(); n = next++) {
      Row& row = rows[n];
      row.scenario = cells[n].name;
      row.seed = cells[n].seed;
      try {
        const Scenario scenario = validate(cells[n]);
        const auto [report, ok] = run_to_dir(scenario, out_dir / ("cell_" + std::to_string(n)));
        row.converged_at = report.converged_at ? std::to_string(*report.converged_at) : "";
        row.final_spread = fmt_double(report.final_spread);
        row.validity = ok ? "valid" : "violated";
      } catch (const ConfigInvalid& e) {
        row.validity = "config_invalid";
        std::lock_guard lock(log_mutex);
        err << row.scenario << ": config invalid: " << e.what() << '\n';
      } catch (const IoFailure& e) {
        row.validity = "io_error";
        row.io_error = true;
        std::lock_guard lock(log_mutex);
        err << row.scenario << ": i/o error: " << e.what() << '\n';
      } catch (const Error& e) {
        row.validity = "error";
        std::lock_guard lock(log_mutex);
        err << row.scenario << ": " << e.what() << '\n';
      }
    }
  };
  try {
    ensure_dir(out_dir);
  } catch (const IoFailure& e) {
    err << "i/o error: " << e.what() << '\n';
    return kExitIoError;
  }
  const std::size_t n_threads = std::max<std::size_t>(1, std::min(threads, cells.size()));
  std::vector<std::thread> pool;
  for (std::size_t k = 0; k < n_threads; ++k) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  std::ofstream csv(out_dir / "summary.csv", std::ios::binary | std::ios::trunc);
  if (!csv) {
    err << "i/o error: cannot write summary.csv\n";
    return kExitIoError;
  }
  csv << "scenario,seed,converged_at,final_spread,validity\n";
  bool violated = false;
  bool io_error = false;
  for (const auto& r : rows) {
    csv << r.scenario << ',' << r.seed << ',' << r.converged_at << ',' << r.final_spread << ',' << r.validity << '\n';
    violated = violated || r.validity == "violated" || r.validity == "error";
    io_error = io_error || r.io_error;
  }
  if (!csv) {
    err << "i/o error: write failed for summary.csv\n";
    return kExitIoError;
  }
  out << cells.size() << " cells, summary in " << (out_dir / "summary.csv").string() << '\n';
  if (io_error) return kExitIoError;
  return violated ? kExitCheckFailed : kExitOk;
}

}  // namespace relayabc
