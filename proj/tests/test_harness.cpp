#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "relayabc/errors.hpp"
#include "relayabc/harness.hpp"
#include "relayabc/report.hpp"
#include "relayabc/simulation.hpp"
#include "support.hpp"

using namespace relayabc;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_text(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

std::size_t count_lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST_CASE("run writes every artifact and reports convergence") {
  const auto dir = fixtures::temp_dir("run");
  std::ostringstream out, err;
  REQUIRE(cmd_run(scenario_preset("complete_h4_b1"), dir, out, err) == kExitOk);
  for (const char* f : {"trace.jsonl", "values.csv", "report.json", "timing.json"}) CHECK(fs::exists(dir / f));
  const auto report = nlohmann::json::parse(slurp(dir / "report.json"));
  CHECK(report.at("format_version") == kFormatVersion);
  CHECK(report.at("kind") == "run_report");
  CHECK(report.at("validity").at("violations") == 0);
  CHECK(report.at("validity").at("valid") == true);
  CHECK(report.at("converged_at").get<std::size_t>() <= 500);
  CHECK(report.at("final_spread").get<double>() < 1e-6);
  CHECK(report.contains("analysis"));
  const auto timing = nlohmann::json::parse(slurp(dir / "timing.json"));
  CHECK(timing.at("kind") == "timing");
  CHECK(out.str().find("converged_at=") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("run rejects broken assumptions with exit 2") {
  const auto dir = fixtures::temp_dir("bad");
  std::ostringstream out, err;
  auto c = scenario_preset("complete_h3_b1_scrambling");
  c.graph = {"complete", 2, 1, {}};
  c.initial_values = {0, 1};
  c.strategies.clear();
  c.strategies[2] = StrategySpec{};
  CHECK(cmd_run(c, dir, out, err) == kExitConfigError);
  CHECK(err.str().find("byzantine_fraction") != std::string::npos);

  auto short_run = scenario_preset("path_h5_b1");
  short_run.T = 3;
  std::ostringstream err2;
  CHECK(cmd_run(short_run, dir, out, err2) == kExitConfigError);
  CHECK(err2.str().find("horizon") != std::string::npos);

  write_text(dir / "junk.json", "{ not json");
  CHECK(cmd_run(dir / "junk.json", dir / "o", out, err) == kExitConfigError);
  CHECK(cmd_run(dir / "absent.json", dir / "o", out, err) == kExitIoError);
  fs::remove_all(dir);
}

TEST_CASE("analyze accepts every preset trace") {
  for (const auto& name : scenario_preset_names()) {
    CAPTURE(name);
    const auto dir = fixtures::temp_dir("analyze");
    auto c = scenario_preset(name);
    c.T = std::min<std::size_t>(c.T, 200);
    write_trace(run_simulation(c), dir / "trace.jsonl");
    std::ostringstream out, err;
    CHECK(cmd_analyze(dir / "trace.jsonl", dir / "a", true, out, err) == kExitOk);
    const auto doc = nlohmann::json::parse(slurp(dir / "a" / "analysis.json"));
    CHECK(doc.at("format_version") == kFormatVersion);
    CHECK(doc.at("kind") == "analysis_report");
    CHECK(fs::exists(dir / "a" / "matrices" / "phase_2.csv"));
    fs::remove_all(dir);
  }
}

TEST_CASE("analyze reports corrupt traces and short traces") {
  const auto dir = fixtures::temp_dir("analyze_bad");
  auto c = scenario_preset("honest_cycle_h4_b1");
  c.T = 5;
  write_trace(run_simulation(c), dir / "short.jsonl");
  std::ostringstream out, err;
  CHECK(cmd_analyze(dir / "short.jsonl", dir / "s", false, out, err) == kExitOk);
  CHECK(out.str().find("no analyzable phase") != std::string::npos);

  const auto full = slurp(dir / "short.jsonl");
  write_text(dir / "cut.jsonl", full.substr(0, full.size() - 7));
  CHECK(cmd_analyze(dir / "cut.jsonl", dir / "c", false, out, err) == kExitIoError);
  CHECK(cmd_analyze(dir / "none.jsonl", dir / "c", false, out, err) == kExitIoError);
  fs::remove_all(dir);
}

TEST_CASE("graphs counts reduced graphs and finds sources") {
  std::ostringstream out, err;
  CHECK(cmd_graphs(3, 1, 1'000'000, out, err) == kExitOk);
  CHECK(out.str().find("h=3 b=1 r=8\n") == 0);
  CHECK(out.str().find("all sourced") != std::string::npos);

  std::ostringstream out5;
  CHECK(cmd_graphs(5, 2, 1'000'000, out5, err) == kExitOk);
  CHECK(out5.str().find("r=" + std::to_string(oracle::binomial(4, 2) * oracle::binomial(4, 2) * oracle::binomial(4, 2) *
                                              oracle::binomial(4, 2) * oracle::binomial(4, 2))) !=
        std::string::npos);

  std::ostringstream err2;
  CHECK(cmd_graphs(4, 2, 1'000'000, out, err2) == kExitConfigError);
  CHECK_FALSE(err2.str().empty());
  CHECK(cmd_graphs(7, 3, 1000, out, err2) == kExitConfigError);
}

TEST_CASE("grid expansion") {
  const auto base = scenario_preset("complete_h4_b1");
  CHECK(expand_grid(base, nlohmann::json::object()).empty());
  CHECK(expand_grid(base, nlohmann::json{{"seeds", nlohmann::json::array()}}).empty());
  const auto cells = expand_grid(base, nlohmann::json{{"seeds", {1, 2}}, {"strategies", {"silent", "forge_attempt"}}});
  REQUIRE(cells.size() == 4);
  CHECK(cells[3].name == base.name + "_cell3");
  CHECK(cells[0].strategies.at(4).kind == StrategyKind::Silent);
  CHECK(cells[3].strategies.at(4).kind == StrategyKind::ForgeAttempt);
  CHECK(cells[1].seed == 2);
  CHECK_THROWS_AS(expand_grid(base, nlohmann::json{{"seeds", 3}}), ConfigInvalid);
}

TEST_CASE("sweep over seeds and strategies") {
  const auto dir = fixtures::temp_dir("sweep");
  write_text(dir / "template.json", config_to_json(scenario_preset("complete_h4_b1")).dump(2));
  nlohmann::json grid{{"format_version", 1},
                      {"seeds", nlohmann::json::array()},
                      {"strategies", {"constant_extreme", "random_equivocate", "forge_attempt"}}};
  for (int s = 1; s <= 10; ++s) grid["seeds"].push_back(s);
  write_text(dir / "grid.json", grid.dump());
  std::ostringstream out, err;
  CHECK(cmd_sweep(dir / "template.json", dir / "grid.json", dir / "out", 4, out, err) == kExitOk);
  const auto csv = slurp(dir / "out" / "summary.csv");
  CHECK(count_lines(csv) == 31);
  CHECK(csv.find("violated") == std::string::npos);
  std::istringstream lines(csv);
  std::string line;
  std::getline(lines, line);
  CHECK(line == "scenario,seed,converged_at,final_spread,validity");
  while (std::getline(lines, line)) CHECK(line.substr(line.rfind(',') + 1) == "valid");

  write_text(dir / "empty.json", R"({"seeds": []})");
  CHECK(cmd_sweep(dir / "template.json", dir / "empty.json", dir / "out2", 2, out, err) == kExitOk);
  fs::remove_all(dir);
}

TEST_CASE("sweep keeps going past an invalid cell") {
  const auto dir = fixtures::temp_dir("sweep_bad");
  write_text(dir / "template.json", config_to_json(scenario_preset("complete_h4_b1")).dump(2));
  write_text(dir / "grid.json", R"({"graphs": [
      {"preset": "complete", "h": 4, "b": 1},
      {"m": 5, "byzantine": [4], "edges": [[0, 1], [1, 0], [2, 3], [3, 2], [4, 0]]}]})");
  std::ostringstream out, err;
  CHECK(cmd_sweep(dir / "template.json", dir / "grid.json", dir / "out", 2, out, err) == kExitOk);
  const auto csv = slurp(dir / "out" / "summary.csv");
  CHECK(count_lines(csv) == 3);
  CHECK(csv.find(",valid\n") != std::string::npos);
  CHECK(csv.find(",config_invalid\n") != std::string::npos);
  CHECK(err.str().find("honest_connectivity") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("identical configs give byte-identical trace and report") {
  const auto dir = fixtures::temp_dir("det");
  std::ostringstream out, err;
  const auto c = scenario_preset("honest_cycle_h4_b1");
  REQUIRE(cmd_run(c, dir / "a", out, err) == kExitOk);
  REQUIRE(cmd_run(c, dir / "b", out, err) == kExitOk);
  CHECK(slurp(dir / "a" / "trace.jsonl") == slurp(dir / "b" / "trace.jsonl"));
  CHECK(slurp(dir / "a" / "report.json") == slurp(dir / "b" / "report.json"));
  CHECK(slurp(dir / "a" / "values.csv") == slurp(dir / "b" / "values.csv"));
  fs::remove_all(dir);
}

TEST_CASE("shipped preset files match the built-in presets") {
  for (const auto& name : scenario_preset_names()) {
    CAPTURE(name);
    const fs::path file = fs::path(RELAYABC_PRESET_DIR) / (name + ".json");
    REQUIRE(fs::exists(file));
    CHECK(config_to_json(load_config(file)) == config_to_json(scenario_preset(name)));
  }
}

TEST_CASE("tool binary exit codes") {
  const auto dir = fixtures::temp_dir("tool");
  const std::string tool = RELAYABC_TOOL;
  auto sh = [](const std::string& cmd) {
    const int rc = std::system((cmd + " >/dev/null 2>&1").c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  };
  const std::string preset = (fs::path(RELAYABC_PRESET_DIR) / "complete_h4_b1.json").string();
  CHECK(sh(tool + " run --config " + preset + " --out " + (dir / "r").string()) == 0);
  CHECK(sh(tool + " analyze --trace " + (dir / "r" / "trace.jsonl").string() + " --out " + (dir / "a").string()) == 0);
  CHECK(sh(tool + " graphs --h 3 --b 1") == 0);
  CHECK(sh(tool + " graphs --h 4 --b 2") == 2);
  CHECK(sh(tool + " run --bogus") == 2);
  CHECK(sh(tool + " run --config " + (dir / "nope.json").string() + " --out " + (dir / "x").string()) == 3);
  fs::remove_all(dir);
}
