#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "config.hpp"
#include "experiments.hpp"

using namespace topopump;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("topopump_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

/// Relative path to contents for every file below dir.
std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file()) out[fs::relative(e.path(), dir).string()] = slurp(e.path());
  }
  return out;
}

config_tree small_pump() {
  return parse_config(
      "[rydberg]\n"
      "[chain]\nn_sites = 96\n"
      "[wavepacket]\nw_k = 0.39269908169872414\n"
      "[run]\nn_cycles = 1\nsteps_per_cycle = 100\nsnapshots_per_cycle = 4\n"
      "[berry]\nm_t = 64\nm_k = 64\n"
      "[bloch]\nn_terms = 48\n"
      "[output]\nsvg = false\n");
}

run_outcome run(const std::string& sub, const config_tree& tree, const fs::path& dir) {
  run_request r;
  r.subcommand = sub;
  r.tree = tree;
  r.out_dir = dir.string();
  return run_experiment(r);
}

}  // namespace

TEST_CASE("every subcommand writes the resolved config and a summary") {
  const fs::path dir = scratch("subcommands");
  config_tree tree = small_pump();
  tree["bands"]["k_points"] = 32.0;
  tree["decay"]["k_points"] = 16.0;
  tree["disorder"]["mode"] = std::string("sigma");
  tree["disorder"]["sigma_r"] = std::vector<double>{0.002, 0.002, 0.002};
  tree["disorder"]["n_samples"] = 4.0;
  tree["disorder"]["mc_samples"] = 50.0;
  for (const char* sub : {"couplings", "bands", "berry", "pump", "decay", "disorder"}) {
    CAPTURE(sub);
    const run_outcome o = run(sub, tree, dir / sub);
    REQUIRE(o.exit_code == exit_ok);
    CHECK(fs::exists(dir / sub / "resolved_config.toml"));
    CHECK(fs::exists(dir / sub / "resolved_config.json"));
    CHECK(fs::exists(dir / sub / "summary.json"));
    CHECK(nlohmann::json::parse(slurp(dir / sub / "summary.json")).at("schema_version").is_number_integer());
    CHECK(o.files.size() >= 4);
  }
  const run_outcome p = run("pump", tree, dir / "pump");
  CHECK(p.summary.at("dx_per_cycle").get<double>() > 0.5);
  const std::string cycles = slurp(dir / "pump" / "cycles.csv");
  CHECK(cycles.rfind("cycle,t,dx,dx_step,fidelity\n", 0) == 0);
  fs::remove_all(dir);
}

TEST_CASE("identical configs give byte-identical outputs") {
  const fs::path dir = scratch("repro");
  REQUIRE(run("pump", small_pump(), dir).exit_code == exit_ok);
  const auto first = snapshot(dir);
  fs::remove_all(dir);
  REQUIRE(run("pump", small_pump(), dir).exit_code == exit_ok);
  CHECK(first == snapshot(dir));
  fs::remove_all(dir);
}

TEST_CASE("the echoed config reproduces the run") {
  const fs::path dir = scratch("roundtrip");
  REQUIRE(run("berry", small_pump(), dir / "first").exit_code == exit_ok);
  const config_tree echoed = load_config((dir / "first" / "resolved_config.toml").string());
  REQUIRE(run("berry", echoed, dir / "second").exit_code == exit_ok);
  /// The echoed configs differ only in the output directory.
  auto a = snapshot(dir / "first");
  auto b = snapshot(dir / "second");
  for (const char* f : {"resolved_config.toml", "resolved_config.json"}) {
    a.erase(f);
    b.erase(f);
  }
  CHECK(a.size() >= 3);
  CHECK(a == b);
  fs::remove_all(dir);
}

TEST_CASE("exit codes") {
  const fs::path dir = scratch("exit");
  config_tree bad = small_pump();
  bad["chain"]["nsites"] = 3.0;
  const run_outcome unknown = run("pump", bad, dir);
  CHECK(unknown.exit_code == exit_config);
  CHECK(unknown.message.find("chain.nsites") != std::string::npos);

  CHECK(run("nonsense", small_pump(), dir).exit_code == exit_config);

  config_tree flat = small_pump();
  flat["cycle"]["control_min"] = 0.15;
  flat["cycle"]["control_max"] = 0.2;
  flat["cycle"]["delta_max"] = 0.0;
  flat["berry"]["max_grid"] = 128.0;
  CHECK(run("berry", flat, dir).exit_code != exit_ok);

  config_tree closing = small_pump();
  closing["cycle"]["delta_max"] = 0.0;
  closing["cycle"]["require_winding"] = false;
  closing["berry"]["max_grid"] = 128.0;
  CHECK(run("berry", closing, dir).exit_code == exit_numerical);

  run_request fig;
  fig.subcommand = "figure";
  fig.figure_id = 4;
  fig.out_dir = dir.string();
  CHECK(run_experiment(fig).exit_code == exit_config);
  fs::remove_all(dir);
}

TEST_CASE("selfcheck passes") {
  const fs::path dir = scratch("selfcheck");
  const run_outcome o = run("selfcheck", {}, dir);
  CHECK(o.exit_code == exit_ok);
  CHECK(o.summary.at("pass").get<bool>());
  fs::remove_all(dir);
}
