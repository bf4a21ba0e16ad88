#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "topopump/topopump.h"

namespace {

struct cli_args {
  std::string config;
  std::vector<std::string> overrides;
  std::string out;
  int figure_id = 0;
  bool quiet = false;
};

void add_common(CLI::App* sub, cli_args& args) {
  sub->add_option("--config,-c", args.config, "Config file (TOML subset)");
  sub->add_option("--set,-s", args.overrides, "Override section.key=value")->take_all();
  sub->add_option("--out,-o", args.out, "Output directory");
  sub->add_flag("--quiet,-q", args.quiet, "Do not print the summary");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"topopump: topological photon pumping on emitter chains"};
  app.require_subcommand(1);
  app.set_version_flag("--version", tp_version());

  cli_args args;
  const std::vector<std::pair<const char*, const char*>> subs = {
      {"couplings", "Coupling and decay matrices, hopping rates at one instant"},
      {"bands", "Bloch bands at one instant and the minimum gap over the cycle"},
      {"berry", "Chern number, integrated curvature and Berry phase profile"},
      {"pump", "Wave-packet pumping dynamics"},
      {"decay", "Collective decay modes, decay profile and survival probability"},
      {"disorder", "Positional disorder: path spread and Monte-Carlo fidelity"},
      {"figure", "Figure reproduction preset (ids 5 to 9)"},
      {"selfcheck", "Invariant suite"}};
  for (const auto& [name, help] : subs) {
    CLI::App* sub = app.add_subcommand(name, help);
    add_common(sub, args);
    if (std::string(name) == "figure") sub->add_option("--id", args.figure_id, "Figure number (5-9)")->required();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  const std::string subcommand = app.get_subcommands().front()->get_name();
  std::vector<const char*> overrides;
  for (const auto& o : args.overrides) overrides.push_back(o.c_str());

  tp_run_options opt{};
  opt.subcommand = subcommand.c_str();
  opt.config_path = args.config.empty() ? nullptr : args.config.c_str();
  opt.overrides = overrides.data();
  opt.n_overrides = static_cast<int>(overrides.size());
  opt.out_dir = args.out.empty() ? nullptr : args.out.c_str();
  opt.figure_id = args.figure_id;

  tp_run_report* report = nullptr;
  if (tp_run(&opt, &report) != TP_OK) {
    std::fprintf(stderr, "topopump: %s\n", tp_last_error());
    return 3;
  }
  const int code = tp_run_report_exit_code(report);
  if (code != 0) {
    std::fprintf(stderr, "topopump: error: %s\n", tp_run_report_message(report));
  } else if (!args.quiet) {
    std::printf("%s\n", tp_run_report_summary(report));
  }
  tp_run_report_free(report);
  return code;
}
