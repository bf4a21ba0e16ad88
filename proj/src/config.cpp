#include "config.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "output.hpp"

namespace topopump {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

/// Removes a trailing comment that is not inside a string.
std::string strip_comment(const std::string& line) {
  bool in_str = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"' && (i == 0 || line[i - 1] != '\\')) in_str = !in_str;
    if (line[i] == '#' && !in_str) return line.substr(0, i);
  }
  return line;
}

double parse_number(const std::string& s, const std::string& where) {
  std::string t;
  for (char c : s) {
    if (c != '_') t.push_back(c);
  }
  if (t == "inf" || t == "+inf") return std::numeric_limits<double>::infinity();
  if (t == "-inf") return -std::numeric_limits<double>::infinity();
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(t, &used);
  } catch (...) {
    fail_config(where + ": cannot parse value '" + s + "'");
  }
  if (used != t.size()) fail_config(where + ": cannot parse value '" + s + "'");
  return v;
}

config_value parse_value(const std::string& raw, const std::string& where) {
  const std::string s = trim(raw);
  if (s.empty()) fail_config(where + ": missing value");
  if (s.front() == '"') {
    if (s.size() < 2 || s.back() != '"') fail_config(where + ": unterminated string");
    std::string out;
    for (std::size_t i = 1; i + 1 < s.size(); ++i) {
      if (s[i] == '\\' && i + 2 < s.size()) {
        const char n = s[++i];
        out.push_back(n == 'n' ? '\n' : n == 't' ? '\t' : n);
      } else {
        out.push_back(s[i]);
      }
    }
    return out;
  }
  if (s == "true") return true;
  if (s == "false") return false;
  if (s.front() == '[') {
    if (s.back() != ']') fail_config(where + ": unterminated array");
    std::vector<double> out;
    std::stringstream body(s.substr(1, s.size() - 2));
    std::string item;
    while (std::getline(body, item, ',')) {
      if (trim(item).empty()) continue;
      out.push_back(parse_number(trim(item), where));
    }
    return out;
  }
  return parse_number(s, where);
}

std::string value_text(const config_value& v) {
  if (const auto* d = std::get_if<double>(&v)) return format_double(*d);
  if (const auto* b = std::get_if<bool>(&v)) return *b ? "true" : "false";
  if (const auto* s = std::get_if<std::string>(&v)) return "\"" + *s + "\"";
  const auto& arr = std::get<std::vector<double>>(v);
  std::string out = "[";
  for (std::size_t i = 0; i < arr.size(); ++i) out += (i ? ", " : "") + format_double(arr[i]);
  return out + "]";
}

/// Typed access that records consumed keys so leftovers can be reported.
class reader {
 public:
  explicit reader(const config_tree& t) : tree_(t) {}

  bool has_section(const std::string& s) const { return tree_.count(s) > 0; }
  bool has(const std::string& s, const std::string& k) const {
    auto it = tree_.find(s);
    return it != tree_.end() && it->second.count(k) > 0;
  }

  double num(const std::string& s, const std::string& k, double def) {
    const config_value* v = find(s, k);
    if (!v) return def;
    if (const auto* d = std::get_if<double>(v)) return *d;
    fail_config(s + "." + k + " must be a number");
  }
  int integer(const std::string& s, const std::string& k, int def) {
    const double d = num(s, k, def);
    if (d != std::floor(d) || std::abs(d) > 2e9) fail_config(s + "." + k + " must be an integer");
    return static_cast<int>(d);
  }
  bool flag(const std::string& s, const std::string& k, bool def) {
    const config_value* v = find(s, k);
    if (!v) return def;
    if (const auto* b = std::get_if<bool>(v)) return *b;
    fail_config(s + "." + k + " must be true or false");
  }
  std::string text(const std::string& s, const std::string& k, const std::string& def) {
    const config_value* v = find(s, k);
    if (!v) return def;
    if (const auto* str = std::get_if<std::string>(v)) return *str;
    fail_config(s + "." + k + " must be a string");
  }
  std::vector<double> list(const std::string& s, const std::string& k, const std::vector<double>& def) {
    const config_value* v = find(s, k);
    if (!v) return def;
    if (const auto* arr = std::get_if<std::vector<double>>(v)) return *arr;
    fail_config(s + "." + k + " must be a numeric array");
  }
  const config_value* raw(const std::string& s, const std::string& k) { return find(s, k); }

  void check_unused() const {
    std::vector<std::string> unknown;
    for (const auto& [sec, keys] : tree_) {
      for (const auto& [key, val] : keys) {
        if (!used_.count(sec + "." + key)) unknown.push_back(sec + "." + key);
      }
      if (keys.empty() && !seen_sections_.count(sec)) unknown.push_back("[" + sec + "]");
    }
    if (!unknown.empty()) {
      std::string msg = "unknown configuration keys:";
      for (const auto& u : unknown) msg += " " + u;
      fail_config(msg);
    }
  }
  void touch_section(const std::string& s) { seen_sections_.insert(s); }

 private:
  const config_value* find(const std::string& s, const std::string& k) {
    touch_section(s);
    auto it = tree_.find(s);
    if (it == tree_.end()) return nullptr;
    auto kt = it->second.find(k);
    if (kt == it->second.end()) return nullptr;
    used_.insert(s + "." + k);
    return &kt->second;
  }

  const config_tree& tree_;
  std::set<std::string> used_;
  std::set<std::string> seen_sections_;
};

void require(bool ok, const std::string& msg) {
  if (!ok) fail_config(msg);
}

struct cycle_defaults {
  double period, delta_max, lo, hi;
};

cycle_defaults defaults_for(platform_kind k, double a) {
  switch (k) {
    case platform_kind::rydberg:
      return {30.0, 7.0, 0.02 * a, 0.2 * a};
    case platform_kind::free_space:
      return {60.0, 4.0, 0.1 * a, 0.8 * a};
    case platform_kind::waveguide:
      return {120.0, 2.0, pi / 4 - 0.8, pi / 4 + 0.8};
  }
  return {1.0, 1.0, 0.0, 1.0};
}

platform read_platform(reader& r, experiment_config& cfg) {
  const bool ry = r.has_section("rydberg"), fs = r.has_section("free_space"), wg = r.has_section("waveguide");
  const int count = int(ry) + int(fs) + int(wg);
  if (count == 0) fail_config("missing platform section: one of [rydberg], [free_space], [waveguide]");
  if (count > 1) fail_config("exactly one platform section may be present");
  if (ry) {
    rydberg_params p;
    p.a = r.num("rydberg", "a", 1.0);
    p.c3 = r.num("rydberg", "c3", 1.0);
    p.h = r.num("rydberg", "h", 7.4 / 12.0 * p.a);
    p.b = r.num("rydberg", "b", 0.16 * p.a);
    p.theta_m = r.num("rydberg", "theta_m", magic_angle);
    cfg.time_unit_us = r.num("rydberg", "time_unit_us", 22.0 / 30.0);
    /// lifetime 500 us expressed in reference time units
    p.decay_rate = r.num("rydberg", "decay_rate", cfg.time_unit_us / 500.0);
    require(p.a > 0 && p.h >= 0 && p.b >= 0 && p.b < p.a, "rydberg: need a > 0, h >= 0, 0 <= b < a");
    require(p.decay_rate >= 0, "rydberg.decay_rate must be >= 0");
    require(cfg.time_unit_us > 0, "rydberg.time_unit_us must be positive");
    return p;
  }
  if (fs) {
    free_space_params p;
    p.a = r.num("free_space", "a", 1.0);
    p.gamma = r.num("free_space", "gamma", 1.0);
    p.a_over_lambda = r.num("free_space", "a_over_lambda", 0.7);
    p.b = r.num("free_space", "b", 0.5 * p.a);
    const config_value* th = r.raw("free_space", "theta_d");
    if (!th || (std::holds_alternative<std::string>(*th) && std::get<std::string>(*th) == "min_j2")) {
      p.theta_d = free_space_min_j2_angle(p.a_over_lambda);
      cfg.theta_d_auto = true;
    } else if (const auto* d = std::get_if<double>(th)) {
      p.theta_d = *d;
    } else {
      fail_config("free_space.theta_d must be a number or \"min_j2\"");
    }
    require(p.a > 0 && p.gamma > 0 && p.a_over_lambda > 0 && p.b > 0 && p.b < p.a,
            "free_space: need a, gamma, a_over_lambda > 0 and 0 < b < a");
    return p;
  }
  waveguide_params p;
  p.a = r.num("waveguide", "a", 1.0);
  p.gamma = r.num("waveguide", "gamma", 1.0);
  p.beta = r.num("waveguide", "beta", pi / p.a);
  p.b = r.num("waveguide", "b", 0.5 * p.a);
  p.phi1 = r.num("waveguide", "phi1", pi / 2);
  p.phi1p = r.num("waveguide", "phi1p", pi / 4);
  p.rho = r.num("waveguide", "rho", 1.0);
  require(p.a > 0 && p.gamma > 0 && p.beta > 0 && p.rho > 0, "waveguide: need a, gamma, beta, rho > 0");
  return p;
}

lattice_sum parse_sum(const std::string& s) {
  if (s == "cesaro") return lattice_sum::cesaro;
  if (s == "truncated") return lattice_sum::truncated;
  fail_config("bloch.summation must be \"cesaro\" or \"truncated\"");
}

int parse_band(const std::string& s, const std::string& where) {
  if (s == "lower") return 0;
  if (s == "upper") return 1;
  fail_config(where + " must be \"lower\" or \"upper\"");
}

vec3 to_vec3(const std::vector<double>& v, const std::string& where) {
  if (v.size() != 3) fail_config(where + " must have three components");
  return vec3(v[0], v[1], v[2]);
}

}  // namespace

config_tree parse_config(const std::string& text) {
  config_tree tree;
  std::string section;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string s = trim(strip_comment(line));
    if (s.empty()) continue;
    const std::string where = "line " + std::to_string(lineno);
    if (s.front() == '[') {
      if (s.back() != ']') fail_config(where + ": malformed section header");
      section = trim(s.substr(1, s.size() - 2));
      if (section.empty()) fail_config(where + ": empty section name");
      if (tree.count(section)) fail_config(where + ": duplicate section [" + section + "]");
      tree[section];
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) fail_config(where + ": expected key = value");
    if (section.empty()) fail_config(where + ": key outside any section");
    const std::string key = trim(s.substr(0, eq));
    if (key.empty()) fail_config(where + ": empty key");
    if (tree[section].count(key)) fail_config(where + ": duplicate key " + section + "." + key);
    tree[section][key] = parse_value(s.substr(eq + 1), where + " (" + section + "." + key + ")");
  }
  return tree;
}

config_tree load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) fail_config("cannot read config file " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

void apply_override(config_tree& tree, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) fail_config("override '" + assignment + "' must look like section.key=value");
  const std::string path = trim(assignment.substr(0, eq));
  const auto dot = path.rfind('.');
  if (dot == std::string::npos || dot == 0 || dot + 1 == path.size()) {
    fail_config("override '" + assignment + "' must name section.key");
  }
  tree[path.substr(0, dot)][path.substr(dot + 1)] = parse_value(assignment.substr(eq + 1), "override " + path);
}

config_tree merge(config_tree a, const config_tree& b) {
  for (const auto& [sec, keys] : b) {
    auto& target = a[sec];
    for (const auto& [k, v] : keys) target[k] = v;
  }
  return a;
}

std::string experiment_config::time_label() const {
  if (physical_units) return "us";
  return kind_of(base) == platform_kind::rydberg ? "a3/c3" : "1/gamma";
}

double experiment_config::reference_rate() const {
  return std::visit(
      [](const auto& p) {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, rydberg_params>) {
          return p.c3 / (p.a * p.a * p.a);
        } else {
          return p.gamma;
        }
      },
      base);
}

evolve_options experiment_config::evolve_opts() const {
  evolve_options o;
  o.n_cycles = n_cycles;
  o.steps_per_cycle = steps_per_cycle;
  o.dissipative = dissipative;
  o.snapshots_per_cycle = snapshots_per_cycle;
  o.adiabatic_threshold = adiabatic_threshold;
  o.krylov.tol = krylov_tol;
  o.monitor_terms = sums.n_terms > 0 ? sums.n_terms : n_sites / 4;
  return o;
}

berry_options experiment_config::berry_opts() const {
  berry_options o;
  o.m_t = berry.m_t;
  o.m_k = berry.m_k;
  o.band = berry.band;
  o.auto_refine = berry.auto_refine;
  o.max_grid = berry.max_grid;
  o.sums = sums;
  return o;
}

experiment_config resolve(const config_tree& tree) {
  reader r(tree);
  experiment_config cfg;
  cfg.base = read_platform(r, cfg);
  const platform_kind kind = kind_of(cfg.base);
  const double a = cfg.a();

  cfg.n_sites = r.integer("chain", "n_sites", 340);
  require(cfg.n_sites >= 4 && cfg.n_sites % 2 == 0, "chain.n_sites must be even and >= 4");
  const std::string units = r.text("chain", "units", "reference");
  if (units == "physical") {
    if (kind != platform_kind::rydberg) {
      fail_config("unit mismatch: chain.units = \"physical\" is only defined for the rydberg platform");
    }
    cfg.physical_units = true;
  } else if (units != "reference") {
    fail_config("chain.units must be \"reference\" or \"physical\"");
  }

  const cycle_defaults cd = defaults_for(kind, a);
  cfg.cycle.base = cfg.base;
  cfg.cycle.period = r.num("cycle", "period", cd.period);
  cfg.cycle.delta_max = r.num("cycle", "delta_max", cd.delta_max);
  cfg.cycle.delta_phase = r.num("cycle", "delta_phase", pi / 2);
  const std::string shape = r.text("cycle", "delta_shape", "sine");
  if (shape == "sine") {
    cfg.cycle.shape = delta_shape::sine;
  } else if (shape == "constant") {
    cfg.cycle.shape = delta_shape::constant;
  } else {
    fail_config("cycle.delta_shape must be \"sine\" or \"constant\"");
  }
  cfg.cycle.control_min = r.num("cycle", "control_min", cd.lo);
  cfg.cycle.control_max = r.num("cycle", "control_max", cd.hi);
  cfg.cycle.control_phase = r.num("cycle", "control_phase", -pi / 2);
  cfg.require_winding = r.flag("cycle", "require_winding", true);
  require(cfg.cycle.period > 0, "cycle.period must be positive");
  require(cfg.cycle.control_min <= cfg.cycle.control_max, "cycle.control_min must not exceed control_max");
  if (kind != platform_kind::waveguide) {
    require(cfg.cycle.control_min > 0 && cfg.cycle.control_max < a, "cycle: b endpoints must lie in (0, a)");
  }

  cfg.sums.kind = parse_sum(r.text("bloch", "summation", "cesaro"));
  cfg.sums.n_terms = r.integer("bloch", "n_terms", 400);
  require(cfg.sums.n_terms >= 1, "bloch.n_terms must be >= 1");

  cfg.packet.k0 = r.num("wavepacket", "k0", 0.0);
  cfg.packet.w_k = r.num("wavepacket", "w_k", two_pi / 100.0 / a);
  cfg.packet.band = parse_band(r.text("wavepacket", "band", "lower"), "wavepacket.band");
  cfg.packet.center_cell = r.integer("wavepacket", "center_cell", -1);
  cfg.packet.edge_tol = r.num("wavepacket", "edge_tol", 1e-6);
  cfg.packet.sums = cfg.sums;
  require(cfg.packet.w_k > 0, "wavepacket.w_k must be positive");

  cfg.n_cycles = r.integer("run", "n_cycles", 10);
  cfg.steps_per_cycle = r.integer("run", "steps_per_cycle", 400);
  cfg.auto_steps = r.flag("run", "auto_steps", false);
  cfg.dissipative = r.flag("run", "dissipative", false);
  cfg.snapshots_per_cycle = r.integer("run", "snapshots_per_cycle", 10);
  cfg.adiabatic_threshold = r.num("run", "adiabatic_threshold", 50.0);
  cfg.krylov_tol = r.num("run", "krylov_tol", 1e-14);
  require(cfg.n_cycles >= 1 && cfg.steps_per_cycle >= 1, "run: n_cycles and steps_per_cycle must be >= 1");

  cfg.berry.m_t = r.integer("berry", "m_t", 256);
  cfg.berry.m_k = r.integer("berry", "m_k", 256);
  cfg.berry.band = parse_band(r.text("berry", "band", "lower"), "berry.band");
  cfg.berry.auto_refine = r.flag("berry", "auto_refine", true);
  cfg.berry.max_grid = r.integer("berry", "max_grid", 4096);
  require(cfg.berry.m_t >= 4 && cfg.berry.m_k >= 4, "berry grids must be >= 4");

  cfg.band_k_points = r.integer("bands", "k_points", 512);
  cfg.band_t_over_T = r.num("bands", "t_over_T", 0.0);

  cfg.decay.range = r.integer("decay", "range", 1 << 20);
  cfg.decay.k_points = r.integer("decay", "k_points", 512);
  cfg.decay.tail_tol = r.num("decay", "tail_tol", 1e-6);

  const std::string mode = r.text("disorder", "mode", "ratio");
  if (mode == "ratio") {
    cfg.disorder.mode = disorder_mode::ratio;
  } else if (mode == "sigma") {
    cfg.disorder.mode = disorder_mode::sigma;
  } else {
    fail_config("disorder.mode must be \"ratio\" or \"sigma\"");
  }
  cfg.disorder.ratios = r.list("disorder", "ratios", cfg.disorder.ratios);
  cfg.disorder.sigma_r = to_vec3(r.list("disorder", "sigma_r", {0.0, 0.0, 0.0}), "disorder.sigma_r");
  cfg.disorder.direction = to_vec3(r.list("disorder", "direction", {1.0, 1.0, 1.0}), "disorder.direction");
  cfg.disorder.n_samples = r.integer("disorder", "n_samples", 200);
  const double seed = r.num("disorder", "seed", 1.0);
  require(seed >= 0 && seed == std::floor(seed) && seed <= 9007199254740992.0,
          "disorder.seed must be a non-negative integer up to 2^53");
  cfg.disorder.seed = static_cast<std::uint64_t>(seed);
  cfg.disorder.mc_samples = r.integer("disorder", "mc_samples", 1000);
  cfg.disorder.n_t = r.integer("disorder", "n_t", 64);
  require((cfg.disorder.sigma_r.array() >= 0).all(), "disorder.sigma_r components must be >= 0");
  require((cfg.disorder.direction.array() >= 0).all() && cfg.disorder.direction.norm() > 0,
          "disorder.direction must be non-negative and nonzero");
  require(cfg.disorder.n_samples >= 1 && cfg.disorder.mc_samples >= 2, "disorder sample counts too small");
  for (double x : cfg.disorder.ratios) require(x >= 0, "disorder.ratios must be >= 0");

  cfg.out_dir = r.text("output", "directory", "out");
  cfg.svg = r.flag("output", "svg", true);

  r.check_unused();
  return cfg;
}

std::string to_config_text(const experiment_config& cfg) {
  std::ostringstream o;
  auto kv = [&o](const std::string& k, const config_value& v) { o << k << " = " << value_text(v) << "\n"; };
  std::visit(
      [&](const auto& p) {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, rydberg_params>) {
          o << "[rydberg]\n";
          kv("a", p.a);
          kv("c3", p.c3);
          kv("h", p.h);
          kv("b", p.b);
          kv("theta_m", p.theta_m);
          kv("decay_rate", p.decay_rate);
          kv("time_unit_us", cfg.time_unit_us);
        } else if constexpr (std::is_same_v<P, free_space_params>) {
          o << "[free_space]\n";
          kv("a", p.a);
          kv("gamma", p.gamma);
          kv("a_over_lambda", p.a_over_lambda);
          kv("b", p.b);
          kv("theta_d", p.theta_d);
        } else {
          o << "[waveguide]\n";
          kv("a", p.a);
          kv("gamma", p.gamma);
          kv("beta", p.beta);
          kv("b", p.b);
          kv("phi1", p.phi1);
          kv("phi1p", p.phi1p);
          kv("rho", p.rho);
        }
      },
      cfg.base);
  o << "\n[chain]\n";
  kv("n_sites", double(cfg.n_sites));
  kv("units", std::string(cfg.physical_units ? "physical" : "reference"));
  o << "\n[cycle]\n";
  kv("period", cfg.cycle.period);
  kv("delta_max", cfg.cycle.delta_max);
  kv("delta_phase", cfg.cycle.delta_phase);
  kv("delta_shape", std::string(cfg.cycle.shape == delta_shape::sine ? "sine" : "constant"));
  kv("control_min", cfg.cycle.control_min);
  kv("control_max", cfg.cycle.control_max);
  kv("control_phase", cfg.cycle.control_phase);
  kv("require_winding", cfg.require_winding);
  o << "\n[bloch]\n";
  kv("summation", std::string(cfg.sums.kind == lattice_sum::cesaro ? "cesaro" : "truncated"));
  kv("n_terms", double(cfg.sums.n_terms));
  o << "\n[wavepacket]\n";
  kv("k0", cfg.packet.k0);
  kv("w_k", cfg.packet.w_k);
  kv("band", std::string(cfg.packet.band == 0 ? "lower" : "upper"));
  kv("center_cell", double(cfg.packet.center_cell));
  kv("edge_tol", cfg.packet.edge_tol);
  o << "\n[run]\n";
  kv("n_cycles", double(cfg.n_cycles));
  kv("steps_per_cycle", double(cfg.steps_per_cycle));
  kv("auto_steps", cfg.auto_steps);
  kv("dissipative", cfg.dissipative);
  kv("snapshots_per_cycle", double(cfg.snapshots_per_cycle));
  kv("adiabatic_threshold", cfg.adiabatic_threshold);
  kv("krylov_tol", cfg.krylov_tol);
  o << "\n[berry]\n";
  kv("m_t", double(cfg.berry.m_t));
  kv("m_k", double(cfg.berry.m_k));
  kv("band", std::string(cfg.berry.band == 0 ? "lower" : "upper"));
  kv("auto_refine", cfg.berry.auto_refine);
  kv("max_grid", double(cfg.berry.max_grid));
  o << "\n[bands]\n";
  kv("k_points", double(cfg.band_k_points));
  kv("t_over_T", cfg.band_t_over_T);
  o << "\n[decay]\n";
  kv("range", double(cfg.decay.range));
  kv("k_points", double(cfg.decay.k_points));
  kv("tail_tol", cfg.decay.tail_tol);
  o << "\n[disorder]\n";
  kv("mode", std::string(cfg.disorder.mode == disorder_mode::ratio ? "ratio" : "sigma"));
  kv("ratios", cfg.disorder.ratios);
  const vec3& s = cfg.disorder.sigma_r;
  const vec3& d = cfg.disorder.direction;
  kv("sigma_r", std::vector<double>{s[0], s[1], s[2]});
  kv("direction", std::vector<double>{d[0], d[1], d[2]});
  kv("n_samples", double(cfg.disorder.n_samples));
  kv("seed", double(cfg.disorder.seed));
  kv("mc_samples", double(cfg.disorder.mc_samples));
  kv("n_t", double(cfg.disorder.n_t));
  o << "\n[output]\n";
  kv("directory", cfg.out_dir);
  kv("svg", cfg.svg);
  return o.str();
}

nlohmann::json to_json(const experiment_config& cfg) {
  nlohmann::json j;
  for (const auto& [sec, keys] : parse_config(to_config_text(cfg))) {
    for (const auto& [k, v] : keys) {
      std::visit([&](const auto& x) { j[sec][k] = x; }, v);
    }
  }
  return j;
}

config_tree platform_preset(const std::string& kind) {
  config_tree t;
  if (kind == "rydberg") {
    t["rydberg"];
  } else if (kind == "free_space") {
    t["free_space"]["a_over_lambda"] = 0.7;
    t["free_space"]["theta_d"] = std::string("min_j2");
  } else if (kind == "waveguide") {
    t["waveguide"];
    t["run"]["steps_per_cycle"] = 400.0;
  } else {
    fail_config("unknown platform preset '" + kind + "'");
  }
  t["chain"]["n_sites"] = 340.0;
  t["run"]["n_cycles"] = 10.0;
  return t;
}

config_tree figure_preset(int id) {
  switch (id) {
    case 5:
      return platform_preset("rydberg");
    case 6:
      return platform_preset("free_space");
    case 7:
      return platform_preset("waveguide");
    case 8: {
      config_tree t = platform_preset("free_space");
      t["wavepacket"]["k0"] = pi;
      t["run"]["n_cycles"] = 1.0;
      t["run"]["dissipative"] = true;
      return t;
    }
    case 9: {
      config_tree t = platform_preset("rydberg");
      t["chain"]["n_sites"] = 196.0;
      t["wavepacket"]["w_k"] = two_pi / 50.0;
      t["run"]["n_cycles"] = 1.0;
      t["disorder"]["ratios"] = std::vector<double>{0.02, 0.05, 0.10};
      return t;
    }
    default:
      fail_config("figure id must be one of 5, 6, 7, 8, 9");
  }
}

}  // namespace topopump
