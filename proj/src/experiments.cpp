#include "experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>

#include "couplings.hpp"
#include "cycle.hpp"
#include "disorder.hpp"
#include "dissipation.hpp"
#include "dynamics.hpp"
#include "output.hpp"
#include "rice_mele.hpp"
#include "topology.hpp"

namespace topopump {

namespace fs = std::filesystem;

namespace {

/// Output directory plus the running list of written files.
class sink {
 public:
  sink(fs::path dir, std::vector<std::string>* files, bool svg) : dir_(std::move(dir)), files_(files), svg_(svg) {}

  sink sub(const std::string& name) const { return sink(dir_ / name, files_, svg_); }
  const fs::path& dir() const { return dir_; }

  void csv(const std::string& name, const table& t) { record(name), write_csv(dir_ / name, t); }
  void json(const std::string& name, const nlohmann::json& j) { record(name), write_json(dir_ / name, j); }
  void text(const std::string& name, const std::string& s) { record(name), write_text(dir_ / name, s); }
  void svg(const std::string& name, const std::string& title, const std::string& xl, const std::string& yl,
           const std::vector<plot_series>& series) {
    if (svg_) text(name, svg_line_plot(title, xl, yl, series));
  }

 private:
  void record(const std::string& name) { files_->push_back((dir_ / name).string()); }

  fs::path dir_;
  std::vector<std::string>* files_;
  bool svg_;
};

std::vector<double> to_std(const rvec& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

std::vector<double> linspace_k(int n, double a) {
  std::vector<double> k(n);
  for (int j = 0; j < n; ++j) k[j] = -pi / a + two_pi / a * j / n;
  return k;
}

table matrix_table(const rmat& m) {
  table t;
  std::vector<double> idx(m.rows());
  for (int i = 0; i < m.rows(); ++i) idx[i] = i;
  t.add("i", idx);
  for (int j = 0; j < m.cols(); ++j) t.add("j" + std::to_string(j), to_std(m.col(j)));
  return t;
}

nlohmann::json warnings_json(const std::vector<warning_record>& w) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& r : w) out.push_back({{"t", r.t}, {"message", r.message}});
  return out;
}

void write_resolved(sink& out, const experiment_config& cfg) {
  out.text("resolved_config.toml", to_config_text(cfg));
  out.json("resolved_config.json", to_json(cfg));
}

double time_scale(const experiment_config& cfg) { return cfg.physical_units ? cfg.time_unit_us : 1.0; }

nlohmann::json header_json(const experiment_config& cfg, const std::string& experiment) {
  return {{"experiment", experiment},
          {"platform", kind_name(kind_of(cfg.base))},
          {"time_unit", cfg.time_label()},
          {"length_unit", "a"}};
}

/// The cycle must wind around the degeneracy point for pumping to be quantized.
int checked_winding(const experiment_config& cfg) {
  const int terms = std::max(1, cfg.n_sites / 4);
  const int w = path_winding(schedule_of(cfg.cycle, terms), 512, terms);
  if (w == 0 && cfg.require_winding) {
    fail_domain("cycle does not encircle the degeneracy point (path winding 0); "
                "set cycle.require_winding = false to run it anyway");
  }
  return w;
}

// ---------------------------------------------------------------- couplings

nlohmann::json run_couplings(const experiment_config& cfg, sink& out) {
  const double t = cfg.band_t_over_T * cfg.cycle.period;
  chain_model chain(cfg.cycle, cfg.n_sites);
  const chain_geometry g = chain.geometry_at(t);
  const coupling_matrices cm = build_coupling_matrices(g, true);
  out.csv("coupling_v.csv", matrix_table(cm.v));
  out.csv("coupling_gamma.csv", matrix_table(cm.gamma));

  const hopping_set h = reference_hoppings(cfg.cycle.platform_at(t), cfg.sums.n_terms, cfg.cycle.delta(t));
  table hop;
  std::vector<double> p(h.j_odd.size());
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = double(i + 1);
  hop.add("p", p).add("j_prime_odd", h.j_prime_odd).add("j_odd", h.j_odd).add("j_even", h.j_even);
  out.csv("hoppings.csv", hop);

  table pos;
  std::vector<double> x(g.n_sites), y(g.n_sites), z(g.n_sites), sub(g.n_sites);
  for (int i = 0; i < g.n_sites; ++i) {
    x[i] = g.positions[i].x();
    y[i] = g.positions[i].y();
    z[i] = g.positions[i].z();
    sub[i] = i % 2;
  }
  pos.add("sublattice", sub).add("x", x).add("y", y).add("z", z);
  out.csv("positions.csv", pos);

  const auto [jbp, jb] = extended_rates(h);
  const auto [res_pi, res_0] = gap_closure_residuals(h);
  nlohmann::json s = header_json(cfg, "couplings");
  s["t"] = t * time_scale(cfg);
  s["control"] = cfg.cycle.control(t);
  s["delta"] = cfg.cycle.delta(t);
  s["jbar_prime"] = jbp;
  s["jbar"] = jb;
  s["delta_jbar"] = jbp - jb;
  s["gap_residual_k_pi"] = res_pi;
  s["gap_residual_k_0"] = res_0;
  s["gamma_trace"] = cm.gamma.trace();
  try {
    const winding_result w = winding_number(reference_hoppings(cfg.cycle.platform_at(t), cfg.sums.n_terms, 0.0));
    s["winding"] = w.winding;
  } catch (const error& e) {
    s["winding"] = nullptr;
    s["winding_note"] = e.what();
  }
  return s;
}

// ---------------------------------------------------------------- bands

nlohmann::json run_bands(const experiment_config& cfg, sink& out) {
  const double t = cfg.band_t_over_T * cfg.cycle.period;
  const double a = cfg.a();
  const hopping_set h = reference_hoppings(cfg.cycle.platform_at(t), cfg.sums.n_terms, cfg.cycle.delta(t));
  const std::vector<double> k = linspace_k(cfg.band_k_points, a);
  std::vector<double> lo(k.size()), hi(k.size());
  double gap = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < k.size(); ++j) {
    const auto [em, ep] = band_energies(make_bloch(h, k[j], cfg.sums));
    lo[j] = em;
    hi[j] = ep;
    gap = std::min(gap, ep - em);
  }
  table tb;
  tb.add("k", k).add("e_lower", lo).add("e_upper", hi);
  out.csv("bands.csv", tb);
  out.svg("bands.svg", "Bloch bands", "k", "E", {{"lower", k, lo}, {"upper", k, hi}});

  nlohmann::json s = header_json(cfg, "bands");
  s["t"] = t * time_scale(cfg);
  s["min_gap_at_t"] = gap;
  s["min_gap_cycle"] = cycle_min_gap(cfg.cycle, cfg.sums.n_terms);
  return s;
}

// ---------------------------------------------------------------- berry

nlohmann::json run_berry(const experiment_config& cfg, sink& out) {
  const double a = cfg.a();
  const int winding = checked_winding(cfg);
  const berry_field f = berry_curvature_grid(schedule_of(cfg.cycle, cfg.sums.n_terms), a, cfg.berry_opts());
  const rvec f_sq = gaussian_f_sq(f.k_mid, cfg.packet.k0, cfg.packet.w_k, a);

  table tw;
  tw.add("k", to_std(f.k_mid)).add("w_k", to_std(f.w_k)).add("f_sq", to_std(f_sq));
  out.csv("w_k.csv", tw);
  table tg;
  tg.add("k", to_std(f.k_nodes)).add("gamma", to_std(f.gamma_k));
  out.csv("berry_phase.csv", tg);
  out.svg("w_k.svg", "Time-integrated curvature", "k", "W_k", {{"W_k", to_std(f.k_mid), to_std(f.w_k)}});

  const double mismatch = curvature_phase_mismatch(f);
  const double wmax = f.w_k.cwiseAbs().maxCoeff();
  nlohmann::json jumps = nlohmann::json::array();
  for (const auto& jp : detect_jumps(f.k_mid, f.w_k)) {
    jumps.push_back({{"k", jp.k}, {"ka_over_pi", jp.k * a / pi}, {"size", jp.size}, {"ratio", jp.ratio}});
  }

  nlohmann::json s = header_json(cfg, "berry");
  s["chern"] = f.chern;
  s["chern_raw"] = f.chern_raw;
  s["grid"] = {f.m_t, f.m_k};
  s["max_plaquette"] = f.max_plaquette;
  s["min_gap"] = f.min_gap;
  s["path_winding"] = winding;
  s["dx_predicted_packet"] = predicted_displacement(f, f_sq);
  s["dx_predicted_uniform"] = predicted_displacement(f, uniform_f_sq(f.k_mid));
  s["curvature_phase_mismatch"] = mismatch;
  s["curvature_phase_mismatch_relative"] = wmax > 0 ? mismatch * f.m_k / wmax : 0.0;
  s["w_k_jumps"] = jumps;
  return s;
}

// ---------------------------------------------------------------- pump

struct pump_result {
  nlohmann::json summary;
  pump_trajectory trajectory;
  wavepacket packet;
};

pump_result run_pump_case(const experiment_config& cfg, sink& out) {
  const double a = cfg.a();
  const double ts = time_scale(cfg);
  const int winding = checked_winding(cfg);
  berry_options bo = cfg.berry_opts();
  bo.band = cfg.packet.band;
  const berry_field f = berry_curvature_grid(schedule_of(cfg.cycle, cfg.sums.n_terms), a, bo);
  const rvec f_sq = gaussian_f_sq(f.k_mid, cfg.packet.k0, cfg.packet.w_k, a);
  const double predicted = predicted_displacement(f, f_sq);

  const wavepacket packet = build_wavepacket(cfg.cycle, cfg.packet, cfg.n_sites);
  const chain_model chain(cfg.cycle, cfg.n_sites);
  evolve_options opt = cfg.evolve_opts();
  nlohmann::json convergence = nullptr;
  if (cfg.auto_steps) {
    const step_convergence sc = converge_steps(packet, chain, opt);
    opt.steps_per_cycle = sc.steps;
    convergence = {{"steps_per_cycle", sc.steps}, {"fidelity_change", sc.change}};
  }
  pump_trajectory tr = evolve(packet.psi, chain, opt);

  const int S = opt.steps_per_cycle;
  std::vector<double> n_col, t_col, dx_col, step_col, fid_col;
  for (int n = 0; n <= opt.n_cycles; ++n) {
    const double dx = tr.com[n * S] - tr.com[0];
    n_col.push_back(n);
    t_col.push_back(n * cfg.cycle.period * ts);
    dx_col.push_back(dx / a);
    step_col.push_back(n == 0 ? 0.0 : (tr.com[n * S] - tr.com[(n - 1) * S]) / a);
    fid_col.push_back(fidelity(packet, dx, tr.cycle_states[n]));
  }
  table tc;
  tc.add("cycle", n_col).add("t", t_col).add("dx", dx_col).add("dx_step", step_col).add("fidelity", fid_col);
  out.csv("cycles.csv", tc);

  std::vector<double> tt(tr.t.size()), dd(tr.t.size());
  for (std::size_t i = 0; i < tr.t.size(); ++i) {
    tt[i] = tr.t[i] * ts;
    dd[i] = (tr.com[i] - tr.com[0]) / a;
  }
  table tj;
  tj.add("t", tt).add("dx", dd).add("norm", tr.norm);
  out.csv("trajectory.csv", tj);

  table tw;
  tw.add("k", to_std(f.k_mid)).add("w_k", to_std(f.w_k)).add("f_sq", to_std(f_sq));
  out.csv("w_k.csv", tw);

  if (!tr.snapshots.empty()) {
    std::vector<double> st, site, sub, xs, rho;
    for (std::size_t n = 0; n < tr.snapshots.size(); ++n) {
      const rvec x = chain.coordinates_at(tr.snapshot_t[n]);
      for (int i = 0; i < cfg.n_sites; ++i) {
        st.push_back(tr.snapshot_t[n] * ts);
        site.push_back(i);
        sub.push_back(i % 2);
        xs.push_back(x[i] / a);
        rho.push_back(tr.snapshots[n][i]);
      }
    }
    table ts_tab;
    ts_tab.add("t", st).add("site", site).add("sublattice", sub).add("x", xs).add("density", rho);
    out.csv("snapshots.csv", ts_tab);
  }

  /// Initial and final density on sublattice B.
  const rvec x0 = chain.coordinates_at(0.0);
  const rvec x1 = chain.coordinates_at(opt.n_cycles * cfg.cycle.period);
  std::vector<double> bx0, bx1, b0, b1;
  for (int i = 1; i < cfg.n_sites; i += 2) {
    bx0.push_back(x0[i] / a);
    bx1.push_back(x1[i] / a);
    b0.push_back(std::norm(packet.psi[i]));
    b1.push_back(std::norm(tr.final_state()[i]));
  }
  table tb;
  tb.add("x_initial", bx0).add("density_initial", b0).add("x_final", bx1).add("density_final", b1);
  out.csv("density_b.csv", tb);

  out.svg("w_k.svg", "Integrated curvature and |f(k)|^2", "k", "W_k",
          {{"W_k", to_std(f.k_mid), to_std(f.w_k)}, {"|f|^2 (scaled)", to_std(f.k_mid),
                                                    to_std(f_sq * (f.w_k.cwiseAbs().maxCoeff() / f_sq.maxCoeff()))}});
  out.svg("density_b.svg", "Density on sublattice B", "x / a", "|psi|^2",
          {{"initial", bx0, b0}, {"final", bx1, b1}});
  out.svg("trajectory.svg", "Center-of-mass displacement", "t", "dx / a", {{"dx", tt, dd}});

  nlohmann::json s = header_json(cfg, "pump");
  s["chern"] = f.chern;
  s["path_winding"] = winding;
  s["berry_grid"] = {f.m_t, f.m_k};
  s["dx_predicted"] = predicted;
  s["dx_per_cycle"] = step_col.size() > 1 ? step_col[1] : 0.0;
  s["dx_mean_per_cycle"] = dx_col.back() / std::max(1, opt.n_cycles);
  s["fidelity_T"] = fid_col.size() > 1 ? fid_col[1] : 1.0;
  s["fidelity_final"] = fid_col.back();
  s["n_cycles"] = opt.n_cycles;
  s["steps_per_cycle"] = opt.steps_per_cycle;
  s["step_convergence"] = convergence;
  s["w_k"] = cfg.packet.w_k;
  s["packet_center_cell"] = packet.center_cell;
  s["max_norm_drift"] = tr.max_norm_drift;
  s["max_krylov_dim"] = tr.max_krylov_dim;
  s["min_gap"] = tr.min_gap;
  s["warnings"] = warnings_json(tr.warnings);
  return {s, std::move(tr), packet};
}

nlohmann::json run_pump(const experiment_config& cfg, sink& out) { return run_pump_case(cfg, out).summary; }

// ---------------------------------------------------------------- decay

nlohmann::json run_decay(const experiment_config& cfg, sink& out) {
  const double a = cfg.a();
  const double ts = time_scale(cfg);
  const platform_kind kind = kind_of(cfg.base);
  chain_model chain(cfg.cycle, cfg.n_sites);
  const rmat gamma = chain.decay_at(0.0);
  const decay_modes dm = decay_modes_of(gamma);
  const double single = self_decay(cfg.base);
  std::vector<double> idx(dm.rates.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  table tr_tab;
  tr_tab.add("mode", idx).add("rate", to_std(dm.rates));
  out.csv("decay_rates.csv", tr_tab);

  nlohmann::json s = header_json(cfg, "decay");
  s["rate_sum"] = dm.rates.sum();
  s["rate_sum_expected"] = cfg.n_sites * single;
  s["rank"] = numerical_rank(dm.rates, 1e-10 * std::max(single, 1e-300));
  s["superradiant_modes"] = count_superradiant(dm.rates, single);
  s["max_rate"] = dm.rates.size() ? dm.rates[0] : 0.0;

  rvec gamma_k;
  const std::vector<double> k = linspace_k(cfg.decay.k_points, a);
  const rvec kv = Eigen::Map<const rvec>(k.data(), k.size());
  if (kind == platform_kind::waveguide) {
    s["profile"] = nullptr;
    s["profile_note"] = "guided-mode decay is concentrated at the light lines k = +-beta; no finite-range profile";
  } else {
    const decay_profile prof = momentum_decay_profile(cfg.base, kv, cfg.decay.range, cfg.decay.tail_tol);
    gamma_k = prof.rate;
    table tp;
    tp.add("k", k).add("gamma_k", to_std(prof.rate));
    out.csv("decay_profile.csv", tp);
    out.svg("decay_profile.svg", "Single-sublattice decay profile", "k", "Gamma(k)",
            {{"Gamma(k)", k, to_std(prof.rate)}});
    s["profile"] = {{"range", prof.range}, {"last_shell", prof.last_shell}};
    const rvec k0 = rvec::Constant(1, cfg.packet.k0);
    s["gamma_at_k0"] = momentum_decay_profile(cfg.base, k0, cfg.decay.range, cfg.decay.tail_tol).rate[0];
  }

  if (cfg.dissipative) {
    const int winding = checked_winding(cfg);
    const wavepacket packet = build_wavepacket(cfg.cycle, cfg.packet, cfg.n_sites);
    evolve_options opt = cfg.evolve_opts();
    opt.dissipative = true;
    const pump_trajectory tr = evolve(packet.psi, chain, opt);
    std::vector<double> tt(tr.t.size());
    for (std::size_t i = 0; i < tt.size(); ++i) tt[i] = tr.t[i] * ts;
    table ts_tab;
    ts_tab.add("t", tt).add("survival", tr.norm);
    out.csv("survival.csv", ts_tab);
    out.svg("survival.svg", "Survival probability", "t", "P_sur", {{"P_sur", tt, tr.norm}});
    const decay_fit fit = effective_decay_rate(tr, cfg.cycle.period);
    double p_min = 1.0;
    for (std::size_t i = 0; i <= static_cast<std::size_t>(opt.steps_per_cycle) && i < tr.norm.size(); ++i) {
      p_min = std::min(p_min, tr.norm[i]);
    }
    s["path_winding"] = winding;
    s["survival_min_first_cycle"] = p_min;
    s["survival_final"] = tr.norm.back();
    s["gamma_eff"] = fit.rate / ts;
    s["gamma_eff_points"] = fit.points;
    s["fit_warnings"] = warnings_json(fit.warnings);
    if (gamma_k.size() > 0) {
      s["gamma_eff_predicted"] = predicted_decay_rate(gaussian_f_sq(kv, cfg.packet.k0, cfg.packet.w_k, a), gamma_k, a) / ts;
    }
    s["warnings"] = warnings_json(tr.warnings);
  }
  return s;
}

// ---------------------------------------------------------------- disorder

nlohmann::json run_disorder(const experiment_config& cfg, sink& out) {
  const int terms = std::max(1, cfg.n_sites / 4);
  const int winding = checked_winding(cfg);
  disorder_spec mc;
  mc.n_samples = cfg.disorder.mc_samples;
  mc.seed = cfg.disorder.seed + 0x9E3779B97F4A7C15ULL;

  struct entry {
    double target;
    vec3 sigma;
  };
  std::vector<entry> entries;
  const vec3 dir = cfg.disorder.direction / cfg.disorder.direction.maxCoeff();
  if (cfg.disorder.mode == disorder_mode::ratio) {
    for (double r : cfg.disorder.ratios) {
      const double scale = r == 0.0 ? 0.0 : calibrate_sigma(cfg.cycle, dir, r, terms, mc, cfg.disorder.n_t);
      entries.push_back({r, scale * dir});
    }
  } else {
    entries.push_back({std::nan(""), cfg.disorder.sigma_r});
  }

  evolve_options opt = cfg.evolve_opts();
  opt.snapshots_per_cycle = 0;
  opt.adiabatic_threshold = 0.0;

  std::vector<double> c_target, c_sx, c_sy, c_sz, c_rmc, c_ran, c_f, c_fse, c_pr, c_prse, c_res;
  nlohmann::json list = nlohmann::json::array();
  for (std::size_t e = 0; e < entries.size(); ++e) {
    disorder_spec spec;
    spec.sigma_r = entries[e].sigma;
    spec.n_samples = cfg.disorder.n_samples;
    spec.seed = cfg.disorder.seed;
    mc.sigma_r = spec.sigma_r;
    const integrated_disorder path = time_integrated_disorder(cfg.cycle, mc, cfg.disorder.n_t, terms);
    const disorder_report rep = monte_carlo_fidelity(cfg.cycle, cfg.packet, cfg.n_sites, spec, opt);

    table tp;
    tp.add("t", to_std(path.t * time_scale(cfg)))
        .add("delta_jbar", to_std(path.djbar))
        .add("sigma_analytic", to_std(path.sigma_analytic))
        .add("sigma_mc", to_std(path.sigma_mc));
    out.csv("path_" + std::to_string(e) + ".csv", tp);

    c_target.push_back(entries[e].target);
    c_sx.push_back(spec.sigma_r.x());
    c_sy.push_back(spec.sigma_r.y());
    c_sz.push_back(spec.sigma_r.z());
    c_rmc.push_back(path.ratio_mc());
    c_ran.push_back(path.ratio_analytic());
    c_f.push_back(rep.fidelity_mean);
    c_fse.push_back(rep.fidelity_stderr);
    c_pr.push_back(rep.per_realization_mean);
    c_prse.push_back(rep.per_realization_stderr);
    c_res.push_back(rep.resampled);
    list.push_back({{"target_ratio", std::isnan(entries[e].target) ? nlohmann::json(nullptr) : nlohmann::json(entries[e].target)},
                    {"sigma_r", {spec.sigma_r.x(), spec.sigma_r.y(), spec.sigma_r.z()}},
                    {"ratio_mc", path.ratio_mc()},
                    {"ratio_appendix_b_estimate", path.ratio_analytic()},
                    {"fidelity", rep.fidelity_mean},
                    {"fidelity_stderr", rep.fidelity_stderr},
                    {"per_realization_fidelity", rep.per_realization_mean},
                    {"per_realization_stderr", rep.per_realization_stderr},
                    {"resampled", rep.resampled}});
  }
  table td;
  td.add("target_ratio", c_target)
      .add("sigma_x", c_sx)
      .add("sigma_y", c_sy)
      .add("sigma_z", c_sz)
      .add("ratio_mc", c_rmc)
      .add("ratio_appendix_b_estimate", c_ran)
      .add("fidelity", c_f)
      .add("fidelity_stderr", c_fse)
      .add("per_realization_fidelity", c_pr)
      .add("per_realization_stderr", c_prse)
      .add("resampled", c_res);
  out.csv("disorder.csv", td);
  out.svg("disorder.svg", "Disorder-averaged fidelity", "sigma(dJ)/dJ", "F", {{"F", c_rmc, c_f}});

  nlohmann::json s = header_json(cfg, "disorder");
  s["path_winding"] = winding;
  s["n_samples"] = cfg.disorder.n_samples;
  s["n_cycles"] = cfg.n_cycles;
  s["entries"] = list;
  return s;
}

// ---------------------------------------------------------------- figures

experiment_config with_tree(const config_tree& preset, const config_tree& user, const std::string& out_override) {
  experiment_config cfg = resolve(merge(preset, user));
  if (!out_override.empty()) cfg.out_dir = out_override;
  return cfg;
}

nlohmann::json run_figure_pump(const experiment_config& cfg, sink& out) {
  sink base = out.sub("base");
  write_resolved(base, cfg);
  const pump_result r1 = run_pump_case(cfg, base);
  base.json("summary.json", r1.summary);

  experiment_config wide = cfg;
  wide.packet.w_k *= 2.0;
  sink w = out.sub("doubled_width");
  write_resolved(w, wide);
  const pump_result r2 = run_pump_case(wide, w);
  w.json("summary.json", r2.summary);

  nlohmann::json s = header_json(cfg, "figure");
  s["dx_predicted"] = r1.summary["dx_predicted"];
  s["dx_per_cycle"] = r1.summary["dx_per_cycle"];
  s["dx_mean_per_cycle"] = r1.summary["dx_mean_per_cycle"];
  s["fidelity_T"] = r1.summary["fidelity_T"];
  s["fidelity_final"] = r1.summary["fidelity_final"];
  s["doubled_width"] = {{"dx_mean_per_cycle", r2.summary["dx_mean_per_cycle"]},
                        {"fidelity_T", r2.summary["fidelity_T"]},
                        {"fidelity_final", r2.summary["fidelity_final"]}};
  s["n_cycles"] = cfg.n_cycles;
  return s;
}

nlohmann::json run_figure8(const config_tree& user, const std::string& out_override, sink& out) {
  nlohmann::json s;
  s["experiment"] = "figure";
  s["cases"] = nlohmann::json::array();
  for (double al : {0.4, 0.7}) {
    config_tree tree = figure_preset(8);
    tree = merge(tree, user);
    tree["free_space"]["a_over_lambda"] = al;
    tree["free_space"]["theta_d"] = std::string("min_j2");
    const experiment_config cfg = with_tree(tree, {}, out_override);
    char name[32];
    std::snprintf(name, sizeof name, "a_over_lambda_%.1f", al);
    sink sub = out.sub(name);
    write_resolved(sub, cfg);
    nlohmann::json cs = run_decay(cfg, sub);
    sub.json("summary.json", cs);
    cs["a_over_lambda"] = al;
    cs["theta_d"] = std::get<free_space_params>(cfg.base).theta_d;
    s["cases"].push_back(cs);
  }
  return s;
}

nlohmann::json run_figure9(const config_tree& user, const std::string& out_override, sink& out) {
  const config_tree common = figure_preset(9);
  nlohmann::json s;
  s["experiment"] = "figure";
  s["platforms"] = nlohmann::json::object();
  std::vector<std::pair<std::string, std::vector<std::pair<double, double>>>> fids;
  for (const std::string kind : {"rydberg", "free_space", "waveguide"}) {
    config_tree tree = platform_preset(kind);
    for (const auto& [sec, keys] : common) {
      if (sec == "rydberg") continue;
      for (const auto& [k, v] : keys) tree[sec][k] = v;
    }
    for (const auto& [sec, keys] : user) {
      const bool platform_section = sec == "rydberg" || sec == "free_space" || sec == "waveguide";
      if (platform_section && sec != kind) continue;
      for (const auto& [k, v] : keys) tree[sec][k] = v;
    }
    const experiment_config cfg = with_tree(tree, {}, out_override);
    sink sub = out.sub(kind);
    write_resolved(sub, cfg);
    const nlohmann::json ps = run_disorder(cfg, sub);
    sub.json("summary.json", ps);
    s["platforms"][kind] = ps["entries"];
  }
  /// Platform with the lowest fidelity at each target ratio.
  nlohmann::json most = nlohmann::json::array();
  const auto& ry = s["platforms"]["rydberg"];
  for (std::size_t e = 0; e < ry.size(); ++e) {
    std::string worst;
    double fmin = 2.0;
    for (const std::string kind : {"rydberg", "free_space", "waveguide"}) {
      const double fval = s["platforms"][kind][e]["fidelity"].get<double>();
      if (fval < fmin) fmin = fval, worst = kind;
    }
    most.push_back({{"target_ratio", ry[e]["target_ratio"]}, {"lowest_fidelity", worst}});
  }
  s["most_affected"] = most;
  return s;
}

// ---------------------------------------------------------------- selfcheck

nlohmann::json run_selfcheck(sink& out, bool& all_pass) {
  nlohmann::json checks = nlohmann::json::array();
  auto add = [&](const std::string& name, bool pass, double value, double limit) {
    checks.push_back({{"name", name}, {"pass", pass}, {"value", value}, {"limit", limit}});
    all_pass = all_pass && pass;
  };

  berry_options bo;
  bo.m_t = 64;
  bo.m_k = 64;
  const hopping_schedule rm = rice_mele_loop(1.0, 0.5);
  const berry_field f = berry_curvature_grid(rm, 1.0, bo);
  add("rice_mele_chern", f.chern == 1 && std::abs(f.chern_raw - 1.0) < 1e-6, f.chern_raw, 1e-6);
  const double dx = predicted_displacement(f, uniform_f_sq(f.k_mid));
  add("rice_mele_uniform_displacement", std::abs(dx - 1.0) < 1e-3, dx, 1e-3);
  bo.gauge_seed = 12345;
  const berry_field g = berry_curvature_grid(rm, 1.0, bo);
  const double gauge = std::max((f.w_k - g.w_k).cwiseAbs().maxCoeff(), std::abs(f.chern_raw - g.chern_raw));
  add("gauge_invariance", gauge < 1e-10, gauge, 1e-10);

  parameter_cycle cyc;
  cyc.base = rydberg_params{};
  cyc.period = 30.0;
  cyc.delta_max = 7.0;
  cyc.control_min = 0.02;
  cyc.control_max = 0.2;
  wavepacket_spec ws;
  ws.w_k = two_pi / 16.0;
  const int n = 96;
  const wavepacket wp = build_wavepacket(cyc, ws, n);
  evolve_options eo;
  eo.steps_per_cycle = 100;
  eo.monitor_terms = 0;
  const pump_trajectory tr = evolve(wp.psi, chain_model(cyc, n), eo);
  add("hermitian_norm_drift", tr.max_norm_drift < 1e-9, tr.max_norm_drift, 1e-9);

  free_space_params fsp;
  const decay_modes dm = decay_modes_of(build_coupling_matrices(build_geometry(fsp, 40)).gamma);
  const double trace_err = std::abs(dm.rates.sum() - 40.0) / 40.0;
  add("decay_trace_rule", trace_err < 1e-10, trace_err, 1e-10);

  const decay_modes wm = decay_modes_of(build_coupling_matrices(build_geometry(waveguide_params{}, 40)).gamma);
  const int rank = numerical_rank(wm.rates, 1e-10);
  add("waveguide_guided_mode_rank", rank == 4, rank, 4);

  disorder_spec zero;
  zero.n_samples = 2;
  const disorder_report rep = monte_carlo_fidelity(cyc, ws, n, zero, eo, 10);
  add("zero_disorder_is_clean", std::abs(1.0 - rep.fidelity_mean) < 1e-12, std::abs(1.0 - rep.fidelity_mean), 1e-12);

  nlohmann::json s;
  s["experiment"] = "selfcheck";
  s["checks"] = checks;
  s["pass"] = all_pass;
  out.json("selfcheck.json", s);
  return s;
}

}  // namespace

int exit_code_for(error_kind kind) {
  switch (kind) {
    case error_kind::config:
    case error_kind::domain:
      return exit_config;
    case error_kind::numerical:
      return exit_numerical;
  }
  return exit_numerical;
}

std::vector<std::string> subcommands() {
  return {"couplings", "bands", "berry", "pump", "decay", "disorder", "figure", "selfcheck"};
}

run_outcome run_experiment(const run_request& req) {
  run_outcome result;
  try {
    const auto names = subcommands();
    if (std::find(names.begin(), names.end(), req.subcommand) == names.end()) {
      fail_config("unknown subcommand '" + req.subcommand + "'");
    }
    if (req.subcommand == "selfcheck") {
      const config_tree tree = req.tree.empty() ? platform_preset("rydberg") : req.tree;
      experiment_config cfg = with_tree(tree, {}, req.out_dir);
      sink out(cfg.out_dir, &result.files, cfg.svg);
      write_resolved(out, cfg);
      bool pass = true;
      result.summary = run_selfcheck(out, pass);
      out.json("summary.json", result.summary);
      if (!pass) {
        result.exit_code = exit_numerical;
        result.message = "selfcheck failed";
      }
      return result;
    }
    if (req.subcommand == "figure") {
      if (req.figure_id < 5 || req.figure_id > 9) fail_config("figure requires --id 5, 6, 7, 8 or 9");
      std::string dir = req.out_dir.empty() ? "out" : req.out_dir;
      bool svg = true;
      if (auto it = req.tree.find("output"); it != req.tree.end()) {
        if (req.out_dir.empty() && it->second.count("directory")) dir = std::get<std::string>(it->second.at("directory"));
        if (it->second.count("svg")) svg = std::get<bool>(it->second.at("svg"));
      }
      sink out(dir, &result.files, svg);
      if (req.figure_id == 8) {
        result.summary = run_figure8(req.tree, req.out_dir, out);
      } else if (req.figure_id == 9) {
        result.summary = run_figure9(req.tree, req.out_dir, out);
      } else {
        result.summary = run_figure_pump(with_tree(figure_preset(req.figure_id), req.tree, req.out_dir), out);
      }
      result.summary["figure"] = req.figure_id;
      out.json("summary.json", result.summary);
      return result;
    }

    const experiment_config cfg = with_tree(req.tree, {}, req.out_dir);
    sink out(cfg.out_dir, &result.files, cfg.svg);
    write_resolved(out, cfg);
    if (req.subcommand == "couplings") {
      result.summary = run_couplings(cfg, out);
    } else if (req.subcommand == "bands") {
      result.summary = run_bands(cfg, out);
    } else if (req.subcommand == "berry") {
      result.summary = run_berry(cfg, out);
    } else if (req.subcommand == "pump") {
      result.summary = run_pump(cfg, out);
    } else if (req.subcommand == "decay") {
      result.summary = run_decay(cfg, out);
    } else {
      result.summary = run_disorder(cfg, out);
    }
    out.json("summary.json", result.summary);
  } catch (const error& e) {
    result.exit_code = exit_code_for(e.kind());
    result.message = e.what();
  } catch (const std::bad_variant_access&) {
    result.exit_code = exit_config;
    result.message = "output.directory must be a string and output.svg a boolean";
  } catch (const std::exception& e) {
    result.exit_code = exit_numerical;
    result.message = e.what();
  }
  return result;
}

}  // namespace topopump
