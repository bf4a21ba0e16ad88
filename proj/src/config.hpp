#pragma once

#include <map>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "cycle.hpp"
#include "disorder.hpp"
#include "dynamics.hpp"
#include "topology.hpp"

namespace topopump {

/// Values of the TOML subset: numbers, booleans, strings and one-line numeric arrays.
using config_value = std::variant<double, bool, std::string, std::vector<double>>;
using config_section = std::map<std::string, config_value>;
using config_tree = std::map<std::string, config_section>;

config_tree parse_config(const std::string& text);
config_tree load_config(const std::string& path);

/// Applies "section.key=value" with the value in config syntax.
void apply_override(config_tree& tree, const std::string& assignment);

/// Keys of b replace those of a.
config_tree merge(config_tree a, const config_tree& b);

struct berry_settings {
  int m_t = 256;
  int m_k = 256;
  int band = 0;
  bool auto_refine = true;
  int max_grid = 4096;
};

struct decay_settings {
  int range = 1 << 20;
  int k_points = 512;
  double tail_tol = 1e-6;
};

enum class disorder_mode { ratio, sigma };

struct disorder_settings {
  disorder_mode mode = disorder_mode::ratio;
  std::vector<double> ratios{0.02, 0.05, 0.10};
  vec3 sigma_r = vec3::Zero();
  vec3 direction = vec3::Ones();
  int n_samples = 200;
  std::uint64_t seed = 1;
  int mc_samples = 1000;  ///< realizations for the Monte-Carlo path spread
  int n_t = 64;
};

struct experiment_config {
  platform base = rydberg_params{};
  bool theta_d_auto = false;  ///< free space: dipole angle chosen to minimize |J_2|
  bool physical_units = false;  ///< Rydberg: report times in microseconds
  double time_unit_us = 22.0 / 30.0;
  int n_sites = 340;
  parameter_cycle cycle;
  bool require_winding = true;
  wavepacket_spec packet;
  int n_cycles = 10;
  int steps_per_cycle = 400;
  bool auto_steps = false;
  bool dissipative = false;
  int snapshots_per_cycle = 10;
  double adiabatic_threshold = 50.0;
  double krylov_tol = 1e-14;
  lattice_sum_options sums{lattice_sum::cesaro, 400};
  berry_settings berry;
  int band_k_points = 512;
  double band_t_over_T = 0.0;
  decay_settings decay;
  disorder_settings disorder;
  std::string out_dir = "out";
  bool svg = true;

  double a() const { return cell_length(base); }
  /// Reference time unit name used in output headers.
  std::string time_label() const;
  double reference_rate() const;
  evolve_options evolve_opts() const;
  berry_options berry_opts() const;
};

/// Resolves a parsed tree against the schema. Unknown sections or keys are errors.
experiment_config resolve(const config_tree& tree);

/// Every field, in config syntax; parsing it back reproduces the same configuration.
std::string to_config_text(const experiment_config& cfg);
nlohmann::json to_json(const experiment_config& cfg);

/// Preset trees for the figure reproductions (ids 5 to 9). Figure 8 and 9 runners derive
/// their variants from these.
config_tree figure_preset(int id);

/// Preset for one of the three reference platform cycles: "rydberg", "free_space" or "waveguide".
config_tree platform_preset(const std::string& kind);

}  // namespace topopump
