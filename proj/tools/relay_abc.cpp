// relay_abc: run, analyze and sweep relay-based approximate consensus scenarios.

#include <iostream>
#include <thread>

#include "CLI11.hpp"
#include "relayabc/harness.hpp"
#include "relayabc/reduced_graph.hpp"
#include "relayabc/report.hpp"

int main(int argc, char** argv) {
  using namespace relayabc;
  CLI::App app{"Relay-based approximate byzantine consensus experiments"};
  app.require_subcommand(1);

  std::string config_path, preset, trace_path, out_dir, template_path, grid_path;
  bool export_matrices = false;
  std::size_t h = 0, b = 0;
  std::uint64_t cap = kDefaultReducedGraphCap;
  std::size_t threads = std::max(1u, std::thread::hardware_concurrency());

  auto* run = app.add_subcommand("run", "Simulate a scenario and write trace, values and report");
  auto* config_opt = run->add_option("--config", config_path, "Scenario document");
  run->add_option("--preset", preset, "Built-in scenario name")->excludes(config_opt);
  run->add_option("--out", out_dir, "Output directory")->required();

  auto* analyze = app.add_subcommand("analyze", "Rebuild phase matrices from a trace and check them");
  analyze->add_option("--trace", trace_path, "trace.jsonl written by run")->required();
  analyze->add_option("--out", out_dir, "Output directory")->required();
  analyze->add_flag("--export-matrices", export_matrices, "Write every phase matrix as CSV");

  auto* graphs = app.add_subcommand("graphs", "Enumerate reduced graphs and check source components");
  graphs->set_help_flag("--help", "Print this help message and exit");
  graphs->add_option("--h", h, "Honest node count")->required();
  graphs->add_option("--b", b, "Removed in-edges per node")->required();
  graphs->add_option("--cap", cap, "Refuse to enumerate more graphs than this");

  auto* sweep = app.add_subcommand("sweep", "Run a template over a parameter grid");
  sweep->add_option("--template", template_path, "Scenario document")->required();
  sweep->add_option("--grid", grid_path, "Grid document")->required();
  sweep->add_option("--out", out_dir, "Output directory")->required();
  sweep->add_option("--threads", threads, "Concurrent cells");

  auto* presets = app.add_subcommand("presets", "List built-in scenarios, or write them as documents");
  std::string presets_dir;
  presets->add_option("--write", presets_dir, "Directory to write <name>.json into");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfigError;
  }

  if (*run) {
    if (!preset.empty()) {
      ScenarioConfig config;
      try {
        config = scenario_preset(preset);
      } catch (const std::invalid_argument& e) {
        std::cerr << "unknown preset: " << preset << '\n';
        return kExitConfigError;
      }
      return cmd_run(config, out_dir, std::cout, std::cerr);
    }
    if (config_path.empty()) {
      std::cerr << "run needs --config or --preset\n";
      return kExitConfigError;
    }
    return cmd_run(config_path, out_dir, std::cout, std::cerr);
  }
  if (*analyze) return cmd_analyze(trace_path, out_dir, export_matrices, std::cout, std::cerr);
  if (*graphs) return cmd_graphs(h, b, cap, std::cout, std::cerr);
  if (*sweep) return cmd_sweep(template_path, grid_path, out_dir, threads, std::cout, std::cerr);
  if (*presets) {
    for (const auto& name : scenario_preset_names()) {
      if (presets_dir.empty()) {
        std::cout << name << '\n';
        continue;
      }
      try {
        std::filesystem::create_directories(presets_dir);
        write_json(config_to_json(scenario_preset(name)), std::filesystem::path(presets_dir) / (name + ".json"));
      } catch (const std::exception& e) {
        std::cerr << "i/o error: " << e.what() << '\n';
        return kExitIoError;
      }
    }
  }
  return kExitOk;
}
