#include "topology.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "parallel.hpp"

namespace topopump {

namespace {

using eigvec_grid = std::vector<Eigen::Vector2cd>;

struct eigen_grid {
  int m_t = 0;
  int m_k = 0;
  eigvec_grid u;       ///< row-major (i, j)
  std::vector<double> gap;
  const Eigen::Vector2cd& at(int i, int j) const { return u[static_cast<size_t>((i % m_t) * m_k + (j % m_k))]; }
};

cplx random_phase(std::uint64_t seed, std::uint64_t index) {
  std::mt19937_64 rng(seed * 0x9E3779B97F4A7C15ULL + index);
  std::uniform_real_distribution<double> angle(-pi, pi);
  return std::polar(1.0, angle(rng));
}

eigen_grid solve_grid(const hopping_schedule& sched, const rvec& k, int m_t, const berry_options& opt) {
  eigen_grid g;
  g.m_t = m_t;
  g.m_k = static_cast<int>(k.size());
  g.u.resize(static_cast<size_t>(m_t) * g.m_k);
  g.gap.resize(g.u.size());
  parallel_for(m_t, [&](int i) {
    const hopping_set h = sched(static_cast<double>(i) / m_t);
    for (int j = 0; j < g.m_k; ++j) {
      const bloch_matrix bm = make_bloch(h, k[j], opt.sums);
      const auto [em, ep] = band_energies(bm);
      const size_t idx = static_cast<size_t>(i) * g.m_k + j;
      g.gap[idx] = ep - em;
      Eigen::Vector2cd u = band_vector(bm, opt.band);
      if (opt.gauge_seed != 0) u *= random_phase(opt.gauge_seed, idx);
      g.u[idx] = u;
    }
  });
  const double gmax = *std::max_element(g.gap.begin(), g.gap.end());
  for (size_t idx = 0; idx < g.gap.size(); ++idx) {
    if (g.gap[idx] < opt.gap_tol * gmax) {
      std::ostringstream msg;
      msg << "band gap closes on the grid at t/T = " << static_cast<double>(idx / g.m_k) / m_t
          << ", k a = " << k[static_cast<Eigen::Index>(idx % g.m_k)];
      fail_numerical(msg.str());
    }
  }
  return g;
}

rvec k_nodes_of(int m_k, double a) {
  rvec k(m_k);
  for (int j = 0; j < m_k; ++j) k[j] = -pi / a + two_pi / a * j / m_k;
  return k;
}

/// Unwraps in k towards gamma_j - (column flux j), the continuous branch. Without the flux
/// the nearest branch is taken, which fails once a column carries more than pi.
rvec wilson_phases(const eigen_grid& g, const rvec* column_flux = nullptr) {
  rvec gamma(g.m_k);
  for (int j = 0; j < g.m_k; ++j) {
    cplx prod(1.0, 0.0);
    for (int i = 0; i < g.m_t; ++i) {
      prod *= g.at(i, j).dot(g.at(i + 1, j));
      const double mag = std::abs(prod);
      if (mag > 0.0) prod /= mag;
    }
    gamma[j] = -std::arg(prod);
  }
  for (int j = 1; j < g.m_k; ++j) {
    const double expected = column_flux ? -(*column_flux)[j - 1] : 0.0;
    double d = gamma[j] - gamma[j - 1];
    d -= two_pi * std::round((d - expected) / two_pi);
    gamma[j] = gamma[j - 1] + d;
  }
  return gamma;
}

berry_field compute_field(const hopping_schedule& sched, double a, int m_t, int m_k, const berry_options& opt) {
  berry_field f;
  f.m_t = m_t;
  f.m_k = m_k;
  f.a = a;
  f.k_nodes = k_nodes_of(m_k, a);
  const double dk = two_pi / a / m_k;
  f.k_mid = f.k_nodes.array() + 0.5 * dk;
  const eigen_grid g = solve_grid(sched, f.k_nodes, m_t, opt);
  f.min_gap = *std::min_element(g.gap.begin(), g.gap.end());
  const double max_gap = *std::max_element(g.gap.begin(), g.gap.end());
  if (!(f.min_gap > 1e-9 * max_gap)) {
    std::ostringstream msg;
    msg << "band gap closes on the grid: minimum gap " << f.min_gap << " at M_t = " << m_t << ", M_k = " << m_k;
    fail_numerical(msg.str());
  }
  f.flux = rmat::Zero(m_t, m_k);
  for (int i = 0; i < m_t; ++i) {
    for (int j = 0; j < m_k; ++j) {
      const auto& u1 = g.at(i, j);
      const auto& u2 = g.at(i + 1, j);
      const auto& u3 = g.at(i + 1, j + 1);
      const auto& u4 = g.at(i, j + 1);
      const cplx loop = u1.dot(u2) * u2.dot(u3) * u3.dot(u4) * u4.dot(u1);
      f.flux(i, j) = -std::arg(loop);
    }
  }
  f.max_plaquette = f.flux.cwiseAbs().maxCoeff();
  f.w_k = f.flux.colwise().sum().transpose() / dk;
  f.chern_raw = f.flux.sum() / two_pi;
  f.chern = static_cast<int>(std::lround(f.chern_raw));
  const rvec column_flux = f.flux.colwise().sum().transpose();
  f.gamma_k = wilson_phases(g, &column_flux);
  return f;
}

}  // namespace

berry_field berry_curvature_grid(const hopping_schedule& sched, double a, const berry_options& opt) {
  int m_t = opt.m_t, m_k = opt.m_k;
  berry_field f = compute_field(sched, a, m_t, m_k, opt);
  if (opt.auto_refine) {
    while (2 * std::max(m_t, m_k) <= opt.max_grid) {
      m_t *= 2;
      m_k *= 2;
      berry_field g = compute_field(sched, a, m_t, m_k, opt);
      const bool stable = g.max_plaquette < pi / 2 && g.chern == f.chern;
      f = std::move(g);
      if (stable) break;
    }
  }
  if (f.max_plaquette >= pi / 2) {
    std::ostringstream msg;
    msg << "grid too coarse: plaquette phase " << f.max_plaquette << " at M_t = " << f.m_t << ", M_k = " << f.m_k;
    fail_numerical(msg.str());
  }
  return f;
}

rvec berry_phase_profile(const hopping_schedule& sched, const rvec& k_grid, const berry_options& opt) {
  const eigen_grid g = solve_grid(sched, k_grid, opt.m_t, opt);
  return wilson_phases(g);
}

double curvature_phase_mismatch(const berry_field& field) {
  double worst = 0.0;
  for (int j = 0; j + 1 < field.m_k; ++j) {
    const double dgamma = (field.gamma_k[j + 1] - field.gamma_k[j]) / field.dk();
    worst = std::max(worst, std::abs(field.w_k[j] + dgamma));
  }
  return worst;
}

rvec gaussian_f_sq(const rvec& k, double k0, double w_k, double a) {
  rvec f(k.size());
  for (Eigen::Index j = 0; j < k.size(); ++j) {
    const double d = wrap_k(k[j] - k0, a);
    f[j] = std::exp(-d * d / (w_k * w_k));
  }
  const double dk = two_pi / a / static_cast<double>(k.size());
  return f * (two_pi / a) / (f.sum() * dk);
}

rvec uniform_f_sq(const rvec& k) { return rvec::Ones(k.size()); }

double predicted_displacement(const berry_field& field, const rvec& f_sq) {
  if (f_sq.size() != field.m_k) fail_domain("predicted_displacement: |f|^2 grid does not match the field");
  const double dk = field.dk();
  const double norm = f_sq.sum() * dk;
  if (std::abs(norm - two_pi / field.a) > 1e-6 * (two_pi / field.a)) {
    fail_domain("predicted_displacement: |f|^2 must satisfy sum |f|^2 dk = 2 pi / a");
  }
  return field.a / two_pi * (f_sq.array() * field.w_k.array()).sum() * dk;
}

double flatness_metric(const rvec& k, const rvec& w, double lo, double hi) {
  double mn = 0, mx = 0, sum = 0;
  int count = 0;
  for (Eigen::Index j = 0; j < k.size(); ++j) {
    if (k[j] < lo || k[j] > hi) continue;
    if (count == 0) mn = mx = w[j];
    mn = std::min(mn, w[j]);
    mx = std::max(mx, w[j]);
    sum += w[j];
    ++count;
  }
  if (count == 0) fail_domain("flatness_metric: empty support");
  return (mx - mn) / std::abs(sum / count);
}

std::vector<jump> detect_jumps(const rvec& k, const rvec& w, double factor, int window) {
  const int n = static_cast<int>(w.size());
  std::vector<double> inc(n);
  for (int j = 0; j < n; ++j) inc[j] = std::abs(w[(j + 1) % n] - w[j]);
  std::vector<jump> out;
  for (int j = 0; j < n; ++j) {
    std::vector<double> near;
    for (int d = -window; d <= window; ++d) {
      if (std::abs(d) <= 1) continue;
      near.push_back(inc[((j + d) % n + n) % n]);
    }
    std::nth_element(near.begin(), near.begin() + near.size() / 2, near.end());
    const double scale = std::max(near[near.size() / 2], 1e-300);
    if (inc[j] > factor * scale) {
      const double kn = j + 1 < n ? k[j + 1] : k[0] + (k[1] - k[0]) * n;
      out.push_back({j, 0.5 * (k[j] + kn), inc[j], inc[j] / scale});
    }
  }
  return out;
}

}  // namespace topopump
