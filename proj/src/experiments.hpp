#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "config.hpp"

namespace topopump {

/// Process exit codes of the command-line runner.
inline constexpr int exit_ok = 0;
inline constexpr int exit_config = 2;
inline constexpr int exit_numerical = 3;

int exit_code_for(error_kind kind);

struct run_request {
  std::string subcommand;  ///< couplings, bands, berry, pump, decay, disorder, figure, selfcheck
  config_tree tree;        ///< parsed config with overrides already applied
  std::string out_dir;     ///< replaces output.directory when non-empty
  int figure_id = 0;
};

struct run_outcome {
  int exit_code = exit_ok;
  std::string message;
  nlohmann::json summary;
  std::vector<std::string> files;  ///< written paths, in write order
};

/// Runs one subcommand. Library errors are caught and mapped to exit codes.
run_outcome run_experiment(const run_request& req);

std::vector<std::string> subcommands();

}  // namespace topopump
