#include "disorder.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "parallel.hpp"

namespace topopump {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t stream_key(std::uint64_t seed, std::uint64_t sample, std::uint64_t attempt) {
  return splitmix64(splitmix64(splitmix64(seed) ^ sample) ^ (attempt * 0xD1B54A32D192ED03ULL));
}

/// Pair direction used for the hopping derivative.
vec3 derivative_axis(const platform& p, const vec3& r) {
  if (kind_of(p) == platform_kind::waveguide) return vec3::UnitZ();
  return r.normalized();
}

/// Separation entering the distance-spread formula; the waveguide rates see only z.
vec3 effective_separation(const platform& p, const vec3& r) {
  if (kind_of(p) == platform_kind::waveguide) return vec3(0.0, 0.0, r.z());
  return r;
}

double djbar_of(const platform& p, const vec3& d, const std::vector<vec3>& a_sites, const std::vector<vec3>& b_sites,
                int n_terms) {
  double s = 0.0;
  for (int q = 1; q <= n_terms; ++q) {
    const double sign = q % 2 == 1 ? 1.0 : -1.0;
    s += sign * (pair_coupling(p, d, a_sites[0], b_sites[q - 1]) - pair_coupling(p, d, b_sites[0], a_sites[q]));
  }
  return s;
}

double trapezoid(const rvec& y, double h) {
  if (y.size() < 2) return 0.0;
  return h * (y.sum() - 0.5 * (y[0] + y[y.size() - 1]));
}

}  // namespace

std::vector<vec3> draw_offsets(const disorder_spec& spec, int sample, int n_emitters, int attempt) {
  std::mt19937_64 rng(stream_key(spec.seed, static_cast<std::uint64_t>(sample), static_cast<std::uint64_t>(attempt)));
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<vec3> out(n_emitters);
  for (auto& v : out) {
    for (int axis = 0; axis < 3; ++axis) v[axis] = spec.sigma_r[axis] * normal(rng);
  }
  return out;
}

double sigma_distance(const vec3& r_ij, const vec3& sigma_r) {
  const double r = r_ij.norm();
  if (r == 0.0) fail_domain("sigma_distance: zero separation");
  return std::sqrt(2.0) * r_ij.cwiseAbs().dot(sigma_r.cwiseAbs()) / r;
}

double sigma_hopping(const platform& p, const vec3& ri, const vec3& rj, double sigma_rij) {
  if (sigma_rij == 0.0) return 0.0;
  const vec3 d = platform_dipole(p);
  const vec3 r = rj - ri;
  const vec3 axis = derivative_axis(p, r);
  const double h = 1e-6 * r.norm();
  auto f = [&](double s) { return pair_coupling(p, d, ri, rj + s * axis); };
  const double d1 = (f(h) - f(-h)) / (2.0 * h);
  const double d2 = (f(0.5 * h) - f(-0.5 * h)) / h;
  return std::abs((4.0 * d2 - d1) / 3.0) * sigma_rij;
}

double sigma_delta_jbar(const std::vector<double>& s) {
  double diag = 0.0, sum = 0.0;
  for (double x : s) {
    diag += x * x;
    sum += x;
  }
  /// sum_{p != q} s_p s_q = (sum s)^2 - sum s^2
  const double off = sum * sum - diag;
  return std::sqrt(std::max(0.0, diag + 0.5 * off));
}

std::vector<double> hopping_sigmas(const platform& p, int n_terms, const vec3& sigma_r) {
  std::vector<double> out;
  out.reserve(2 * n_terms);
  const vec3 a0 = site_position(p, 0, 0);
  const vec3 b0 = site_position(p, 0, 1);
  for (int q = 1; q <= n_terms; ++q) {
    const vec3 bq = site_position(p, q - 1, 1);
    const vec3 aq = site_position(p, q, 0);
    out.push_back(sigma_hopping(p, a0, bq, sigma_distance(effective_separation(p, bq - a0), sigma_r)));
    out.push_back(sigma_hopping(p, b0, aq, sigma_distance(effective_separation(p, aq - b0), sigma_r)));
  }
  return out;
}

double monte_carlo_sigma_djbar(const platform& p, int n_terms, const disorder_spec& spec) {
  if (spec.n_samples < 2) fail_config("Monte-Carlo spread needs at least two samples");
  const vec3 d = platform_dipole(p);
  std::vector<vec3> a_sites(n_terms + 1), b_sites(n_terms);
  double mean = 0.0, m2 = 0.0;
  for (int s = 0; s < spec.n_samples; ++s) {
    const std::vector<vec3> off = draw_offsets(spec, s, 2 * n_terms + 1);
    for (int q = 0; q <= n_terms; ++q) a_sites[q] = site_position(p, q, 0) + off[q];
    for (int q = 0; q < n_terms; ++q) b_sites[q] = site_position(p, q, 1) + off[n_terms + 1 + q];
    const double x = djbar_of(p, d, a_sites, b_sites, n_terms);
    /// Welford update
    const double delta = x - mean;
    mean += delta / (s + 1);
    m2 += delta * (x - mean);
  }
  return std::sqrt(m2 / (spec.n_samples - 1));
}

integrated_disorder time_integrated_disorder(const parameter_cycle& cycle, const disorder_spec& spec, int n_t,
                                             int n_terms) {
  if (n_t < 64) fail_config("time_integrated_disorder needs n_t >= 64");
  integrated_disorder out;
  out.t.resize(n_t + 1);
  out.djbar.resize(n_t + 1);
  out.sigma_analytic.resize(n_t + 1);
  out.sigma_mc.resize(n_t + 1);
  const bool clean = spec.sigma_r.isZero(0.0);
  parallel_for(n_t + 1, [&](int i) {
    const double t = cycle.period * i / n_t;
    const platform p = cycle.platform_at(t);
    const auto [jbp, jb] = extended_rates(reference_hoppings(p, n_terms));
    out.t[i] = t;
    out.djbar[i] = jbp - jb;
    out.sigma_analytic[i] = sigma_delta_jbar(hopping_sigmas(p, n_terms, spec.sigma_r));
    out.sigma_mc[i] = clean ? 0.0 : monte_carlo_sigma_djbar(p, n_terms, spec);
  });
  const double h = cycle.period / n_t;
  out.delta_J = trapezoid(out.djbar, h);
  out.abs_delta_J = trapezoid(out.djbar.cwiseAbs(), h);
  out.sigma_int_analytic = trapezoid(out.sigma_analytic, h);
  out.sigma_int_mc = trapezoid(out.sigma_mc, h);
  return out;
}

double calibrate_sigma(const parameter_cycle& cycle, const vec3& direction, double target_ratio, int n_terms,
                       const disorder_spec& mc, int n_t) {
  if (target_ratio <= 0.0) return 0.0;
  disorder_spec probe = mc;
  double s = 1e-3 * cell_length(cycle.base);
  for (int it = 0; it < 8; ++it) {
    probe.sigma_r = s * direction;
    const double r = time_integrated_disorder(cycle, probe, n_t, n_terms).ratio_mc();
    if (!(r > 0.0)) fail_numerical("disorder direction leaves the path undisturbed");
    const double next = s * target_ratio / r;
    if (std::abs(r - target_ratio) < 1e-3 * target_ratio) return s;
    s = next;
  }
  return s;
}

disorder_report monte_carlo_fidelity(const parameter_cycle& cycle, const wavepacket_spec& packet, int n_sites,
                                     const disorder_spec& spec, const evolve_options& evolve_opt, int bootstrap) {
  if (spec.n_samples < 1) fail_config("disorder n_samples must be >= 1");
  if ((spec.sigma_r.array() < 0.0).any()) fail_config("disorder sigma_r components must be >= 0");
  evolve_options opt = evolve_opt;
  opt.n_cycles = 1;
  opt.dissipative = false;
  opt.snapshots_per_cycle = 0;
  const wavepacket wp = build_wavepacket(cycle, packet, n_sites);
  const cvec clean = evolve(wp.psi, chain_model(cycle, n_sites), opt).final_state();
  /// The adiabaticity margin belongs to the clean cycle; realizations skip the scan.
  opt.adiabatic_threshold = 0.0;

  disorder_report rep;
  rep.overlaps.resize(spec.n_samples);
  std::vector<int> retries(spec.n_samples, 0);
  parallel_for(spec.n_samples, [&](int s) {
    for (int attempt = 0;; ++attempt) {
      try {
        const chain_model chain(cycle, n_sites, draw_offsets(spec, s, n_sites, attempt));
        const cvec psi = evolve(wp.psi, chain, opt).final_state();
        rep.overlaps[s] = clean.dot(psi);
        retries[s] = attempt;
        return;
      } catch (const error& e) {
        if (e.kind() != error_kind::domain || attempt >= 16) throw;
      }
    }
  });
  for (int r : retries) rep.resampled += r;

  const int n = spec.n_samples;
  auto averaged = [&](const std::vector<int>& idx) {
    cplx m(0.0, 0.0);
    for (int i : idx) m += rep.overlaps[i];
    return std::norm(m / static_cast<double>(idx.size()));
  };
  std::vector<int> all(n);
  for (int i = 0; i < n; ++i) all[i] = i;
  rep.fidelity_mean = averaged(all);

  double pm = 0.0, pm2 = 0.0;
  for (const cplx& c : rep.overlaps) {
    pm += std::norm(c);
    pm2 += std::norm(c) * std::norm(c);
  }
  pm /= n;
  rep.per_realization_mean = pm;
  rep.per_realization_stderr = n > 1 ? std::sqrt(std::max(0.0, pm2 / n - pm * pm) / (n - 1)) : 0.0;

  if (n > 1 && bootstrap > 1) {
    std::mt19937_64 rng(stream_key(spec.seed, 0xB0075742ULL, 0));
    std::uniform_int_distribution<int> pick(0, n - 1);
    std::vector<int> idx(n);
    double bm = 0.0, bm2 = 0.0;
    for (int b = 0; b < bootstrap; ++b) {
      for (int& i : idx) i = pick(rng);
      const double f = averaged(idx);
      bm += f;
      bm2 += f * f;
    }
    bm /= bootstrap;
    rep.fidelity_stderr = std::sqrt(std::max(0.0, bm2 / bootstrap - bm * bm));
  }
  return rep;
}

}  // namespace topopump
