#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "config.hpp"
#include "disorder.hpp"
#include "dissipation.hpp"
#include "experiments.hpp"
#include "topology.hpp"

using namespace topopump;
namespace fs = std::filesystem;

namespace {

const char* platforms[] = {"rydberg", "free_space", "waveguide"};

struct verdict {
  int id = 0;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

class stopwatch {
 public:
  double seconds() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count(); }

 private:
  std::chrono::steady_clock::time_point t0_ = std::chrono::steady_clock::now();
};

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

nlohmann::json run_figure(int id, const fs::path& dir) {
  run_request r;
  r.subcommand = "figure";
  r.figure_id = id;
  r.out_dir = dir.string();
  const run_outcome o = run_experiment(r);
  if (o.exit_code != exit_ok) throw std::runtime_error("figure " + std::to_string(id) + ": " + o.message);
  return o.summary;
}

berry_field field_of(const experiment_config& cfg, int m_t, int m_k, std::uint64_t gauge_seed = 0) {
  berry_options bo = cfg.berry_opts();
  bo.m_t = m_t;
  bo.m_k = m_k;
  bo.auto_refine = false;
  bo.gauge_seed = gauge_seed;
  return berry_curvature_grid(schedule_of(cfg.cycle, cfg.sums.n_terms), cfg.a(), bo);
}

/// Configuration of the disorder figure for one platform.
experiment_config disorder_config(const std::string& kind) {
  config_tree tree = platform_preset(kind);
  for (const auto& [sec, keys] : figure_preset(9)) {
    if (sec == "rydberg") continue;
    for (const auto& [k, v] : keys) tree[sec][k] = v;
  }
  return resolve(tree);
}

disorder_spec path_spec(const experiment_config& cfg) {
  disorder_spec mc;
  mc.n_samples = cfg.disorder.mc_samples;
  mc.seed = cfg.disorder.seed + 0x9E3779B97F4A7C15ULL;
  return mc;
}

vec3 unit_direction(const experiment_config& cfg) { return cfg.disorder.direction / cfg.disorder.direction.maxCoeff(); }

disorder_report fidelity_at(const experiment_config& cfg, const vec3& sigma_r, int n_samples) {
  disorder_spec s;
  s.sigma_r = sigma_r;
  s.n_samples = n_samples;
  s.seed = cfg.disorder.seed;
  return monte_carlo_fidelity(cfg.cycle, cfg.packet, cfg.n_sites, s, cfg.evolve_opts());
}

// ---------------------------------------------------------------- criteria

verdict criterion_1() {
  berry_options bo;
  bo.m_t = 256;
  bo.m_k = 256;
  const berry_field f = berry_curvature_grid(rice_mele_loop(1.0, 0.5), 1.0, bo);
  const double residual = std::abs(f.chern_raw - f.chern);
  const double dx = predicted_displacement(f, uniform_f_sq(f.k_mid));
  verdict v;
  v.pass = f.chern == 1 && residual < 1e-6 && std::abs(dx - 1.0) <= 1e-3;
  v.detail = "Rice-Mele 256x256: C=" + std::to_string(f.chern) + " residual=" + fmt("%.2e", residual) +
             " dx/a=" + fmt("%.6f", dx);
  return v;
}

verdict criterion_2_5(std::vector<berry_field>& fields) {
  verdict v;
  v.pass = true;
  for (const char* kind : platforms) {
    const experiment_config cfg = resolve(platform_preset(kind));
    fields.push_back(field_of(cfg, 512, 512));
    const berry_field& f = fields.back();
    const double mismatch = curvature_phase_mismatch(f);
    const double limit = 5.0 / f.m_k * f.w_k.cwiseAbs().maxCoeff();
    v.pass = v.pass && mismatch < limit;
    v.detail += std::string(v.detail.empty() ? "" : "; ") + kind + " " + fmt("%.2e", mismatch) + " < " +
                fmt("%.2e", limit);
  }
  return v;
}

verdict criterion_5(const std::vector<berry_field>& fields) {
  struct target {
    int field;
    const char* name;
    double ka_over_pi;
  };
  /// Free space at a = 0.7 lambda: k a = +-2 pi (1 - a / lambda).
  const target targets[] = {{1, "free_space", 0.6}, {2, "waveguide", 0.5}};
  verdict v;
  v.pass = true;
  for (const target& t : targets) {
    const berry_field& f = fields[t.field];
    const std::vector<jump> jumps = detect_jumps(f.k_mid, f.w_k, 10.0);
    std::string found;
    for (const jump& j : jumps) found += fmt(" %.4f", j.k * f.a / pi);
    for (double sign : {-1.0, 1.0}) {
      const double k = sign * t.ka_over_pi * pi / f.a;
      bool hit = false;
      for (const jump& j : jumps) hit = hit || std::abs(j.k - k) <= f.dk();
      v.pass = v.pass && hit;
    }
    v.detail += std::string(v.detail.empty() ? "" : "; ") + t.name + " target +-" + fmt("%.2f", t.ka_over_pi) +
                "pi, jumps at ka/pi =" + (found.empty() ? " none" : found);
  }
  return v;
}

struct pump_figures {
  nlohmann::json summary[3];
};

verdict criterion_3(const pump_figures& p) {
  verdict v;
  v.pass = true;
  for (int i = 0; i < 3; ++i) {
    const double dyn = p.summary[i]["dx_per_cycle"].get<double>();
    const double pred = p.summary[i]["dx_predicted"].get<double>();
    v.pass = v.pass && std::abs(dyn - pred) < 0.02;
    v.detail += std::string(i ? "; " : "") + platforms[i] + " dyn " + fmt("%.4f", dyn) + " pred " +
                fmt("%.4f", pred);
  }
  return v;
}

verdict criterion_4(const pump_figures& p) {
  struct band {
    double f_min, lo, hi, sign;
  };
  const band bands[] = {{0.995, 0.94, 0.99, 1.0}, {0.99, 0.77, 0.84, 1.0}, {0.99, 0.89, 0.95, -1.0}};
  verdict v;
  v.pass = true;
  for (int i = 0; i < 3; ++i) {
    const nlohmann::json& s = p.summary[i];
    const double f = s["fidelity_T"].get<double>();
    const double dx = s["dx_per_cycle"].get<double>();
    const double f10 = s["fidelity_final"].get<double>();
    const double f10w = s["doubled_width"]["fidelity_final"].get<double>();
    const band& b = bands[i];
    const bool ok = f >= b.f_min && dx * b.sign >= b.lo && dx * b.sign <= b.hi && f10w < f10;
    v.pass = v.pass && ok;
    v.detail += std::string(i ? "; " : "") + platforms[i] + " F(T)=" + fmt("%.5f", f) + " dx=" + fmt("%.4f", dx) +
                " F(10T) " + fmt("%.3f", f10) + " -> " + fmt("%.3f", f10w);
  }
  return v;
}

verdict criterion_6(const fs::path& dir) {
  verdict v;
  /// (i) rank of the helix decay matrix
  std::set<int> ranks;
  for (int n = 4; n <= 100; n += 2) {
    const rmat g = build_coupling_matrices(build_geometry(waveguide_params{}, n)).gamma;
    ranks.insert(numerical_rank(decay_modes_of(g).rates, 1e-10));
  }
  const bool rank_ok = ranks.size() == 1 && *ranks.begin() == 2;
  std::string rank_text;
  for (int r : ranks) rank_text += (rank_text.empty() ? "" : ",") + std::to_string(r);

  /// (ii), (iii) survival and effective rate
  const nlohmann::json fig8 = run_figure(8, dir / "figure8");
  double p_sur = 0.0, gamma_eff = 0.0;
  for (const auto& c : fig8["cases"]) {
    if (c["a_over_lambda"].get<double>() < 0.5) p_sur = c["survival_min_first_cycle"].get<double>();
    else gamma_eff = c["gamma_eff"].get<double>();
  }

  /// (iv) trace rule
  double trace_err = 0.0;
  for (const platform& p : {platform{free_space_params{}}, platform{waveguide_params{}}}) {
    const decay_modes dm = decay_modes_of(build_coupling_matrices(build_geometry(p, 100)).gamma);
    trace_err = std::max(trace_err, std::abs(dm.rates.sum() - 100.0) / 100.0);
  }

  v.pass = rank_ok && p_sur >= 0.999 && gamma_eff >= 1.2 && gamma_eff <= 2.0 && trace_err < 1e-10;
  v.detail = std::string("(i) helix rank for N=4..100: {") + rank_text + "} required 2" + (rank_ok ? "" : " [fail]") +
             "; (ii) P_sur(a/l=0.4) min " + fmt("%.7f", p_sur) + "; (iii) Gamma_eff(a/l=0.7) " +
             fmt("%.4f", gamma_eff) + "; (iv) trace " + fmt("%.1e", trace_err);
  return v;
}

verdict criterion_7() {
  verdict v;
  const experiment_config ry = disorder_config("rydberg");

  /// (i) zero disorder
  const disorder_report zero = fidelity_at(ry, vec3::Zero(), 2);
  const double zero_err = std::max(std::abs(1.0 - zero.fidelity_mean), std::abs(1.0 - zero.per_realization_mean));

  /// (ii) analytic path spread against Monte Carlo at a 2% ratio
  std::string ratio_text;
  double fs_rel = 0.0;
  for (const char* kind : platforms) {
    const experiment_config cfg = disorder_config(kind);
    const int terms = cfg.n_sites / 4;
    const disorder_spec mc = path_spec(cfg);
    disorder_spec probe = mc;
    probe.sigma_r = calibrate_sigma(cfg.cycle, unit_direction(cfg), 0.02, terms, mc, cfg.disorder.n_t) *
                    unit_direction(cfg);
    const integrated_disorder d = time_integrated_disorder(cfg.cycle, probe, cfg.disorder.n_t, terms);
    const double rel = d.ratio_analytic() / d.ratio_mc() - 1.0;
    if (std::string(kind) == "free_space") fs_rel = rel;
    ratio_text += std::string(ratio_text.empty() ? "" : " ") + kind + "=" + fmt("%+.3f", rel);
  }

  /// (iii) scaling of the infidelity with the disorder strength
  const int terms = ry.n_sites / 4;
  const double s_ref = calibrate_sigma(ry.cycle, unit_direction(ry), 0.02, terms, path_spec(ry), ry.disorder.n_t);
  std::vector<double> lx, ly;
  for (double m : {0.5, 1.0, 2.0}) {
    const disorder_report r = fidelity_at(ry, m * s_ref * unit_direction(ry), 200);
    lx.push_back(std::log(m * s_ref));
    ly.push_back(std::log(1.0 - r.fidelity_mean));
  }
  const double mx = (lx[0] + lx[1] + lx[2]) / 3.0, my = (ly[0] + ly[1] + ly[2]) / 3.0;
  double sxy = 0.0, sxx = 0.0;
  for (int i = 0; i < 3; ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  const double exponent = sxy / sxx;

  /// (iv) most affected platform at a 10% ratio
  double f[3], se[3];
  for (int i = 0; i < 3; ++i) {
    const experiment_config cfg = disorder_config(platforms[i]);
    const double s = calibrate_sigma(cfg.cycle, unit_direction(cfg), 0.10, cfg.n_sites / 4, path_spec(cfg),
                                     cfg.disorder.n_t);
    const disorder_report r = fidelity_at(cfg, s * unit_direction(cfg), 200);
    f[i] = r.fidelity_mean;
    se[i] = r.fidelity_stderr;
  }
  bool lowest = true;
  for (int i : {0, 2}) lowest = lowest && f[i] - f[1] >= 2.0 * std::hypot(se[i], se[1]);

  v.pass = zero_err < 1e-12 && std::abs(fs_rel) <= 0.15 && std::abs(exponent - 2.0) <= 0.3 && lowest;
  v.detail = "(i) sigma=0 deviation " + fmt("%.1e", zero_err) + "; (ii) analytic/MC - 1 at 2%: " + ratio_text +
             " (free space judged); (iii) exponent " + fmt("%.3f", exponent) + "; (iv) F at 10%: rydberg " +
             fmt("%.4f", f[0]) + "+-" + fmt("%.4f", se[0]) + " free_space " + fmt("%.4f", f[1]) + "+-" +
             fmt("%.4f", se[1]) + " waveguide " + fmt("%.4f", f[2]) + "+-" + fmt("%.4f", se[2]);
  return v;
}

verdict criterion_8(const pump_figures& p) {
  double drift = 0.0;
  for (const auto& s : p.summary) {
    const double d = s.contains("max_norm_drift") ? s["max_norm_drift"].get<double>() : 0.0;
    drift = std::max(drift, d);
  }
  double gauge = 0.0;
  bool grids = true;
  std::vector<experiment_config> cfgs;
  for (const char* kind : platforms) cfgs.push_back(resolve(platform_preset(kind)));
  for (const experiment_config& cfg : cfgs) {
    const berry_field a = field_of(cfg, 128, 128);
    const berry_field b = field_of(cfg, 128, 128, 20240917);
    gauge = std::max(gauge, (a.flux - b.flux).cwiseAbs().maxCoeff());
    gauge = std::max(gauge, (a.w_k - b.w_k).cwiseAbs().maxCoeff());
    gauge = std::max(gauge, std::abs(a.chern_raw - b.chern_raw));
    for (Eigen::Index j = 0; j < a.gamma_k.size(); ++j) {
      gauge = std::max(gauge, std::abs(std::remainder(a.gamma_k[j] - b.gamma_k[j], two_pi)));
    }
    grids = grids && field_of(cfg, 256, 256).chern == a.chern;
  }
  verdict v;
  v.pass = drift < 1e-9 && gauge < 1e-10 && grids;
  v.detail = "norm drift " + fmt("%.1e", drift) + "; gauge change " + fmt("%.1e", gauge) +
             "; Chern stable under grid doubling: " + (grids ? "yes" : "no");
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  fs::path dir = "acceptance_out";
  std::set<int> allowed;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--out" && i + 1 < argc) {
      dir = argv[++i];
    } else if (arg == "--allow" && i + 1 < argc) {
      std::stringstream ids(argv[++i]);
      for (std::string id; std::getline(ids, id, ',');) allowed.insert(std::stoi(id));
    } else {
      std::fprintf(stderr, "usage: acceptance [--out DIR] [--allow ID[,ID...]]\n");
      return 2;
    }
  }
  fs::create_directories(dir);

  std::vector<verdict> results;
  auto timed = [&](int id, auto&& body) {
    stopwatch sw;
    verdict v;
    try {
      v = body();
    } catch (const std::exception& e) {
      v.pass = false;
      v.detail = std::string("error: ") + e.what();
    }
    v.id = id;
    v.seconds = sw.seconds();
    std::printf("criterion %d: %s  %s  (%.1f s)\n", v.id, v.pass ? "PASS" : "FAIL", v.detail.c_str(), v.seconds);
    std::fflush(stdout);
    results.push_back(v);
  };

  pump_figures figs;
  std::vector<berry_field> fields;
  timed(1, [] { return criterion_1(); });
  timed(2, [&] { return criterion_2_5(fields); });
  timed(3, [&] {
    for (int i = 0; i < 3; ++i) figs.summary[i] = run_figure(5 + i, dir / ("figure" + std::to_string(5 + i)));
    for (int i = 0; i < 3; ++i) {
      const fs::path base = dir / ("figure" + std::to_string(5 + i)) / "base" / "summary.json";
      std::ifstream in(base);
      figs.summary[i]["max_norm_drift"] = nlohmann::json::parse(in)["max_norm_drift"];
    }
    return criterion_3(figs);
  });
  timed(4, [&] { return criterion_4(figs); });
  timed(5, [&] {
    if (fields.size() != 3) throw std::runtime_error("criterion 2 fields unavailable");
    return criterion_5(fields);
  });
  timed(6, [&] { return criterion_6(dir); });
  timed(7, [] { return criterion_7(); });
  timed(8, [&] { return criterion_8(figs); });

  int failed = 0, unexpected = 0;
  std::ofstream report(dir / "acceptance_report.txt");
  for (const verdict& v : results) {
    report << "criterion " << v.id << ": " << (v.pass ? "PASS" : "FAIL") << "  " << v.detail << "\n";
    if (!v.pass) {
      ++failed;
      if (!allowed.count(v.id)) ++unexpected;
    }
  }
  std::printf("%d of %zu criteria pass", static_cast<int>(results.size()) - failed, results.size());
  if (failed > unexpected) std::printf("; %d failing criterion(s) listed with --allow", failed - unexpected);
  std::printf("\n");
  return unexpected == 0 ? 0 : 1;
}
