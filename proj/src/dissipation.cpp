#include "dissipation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "parallel.hpp"

namespace topopump {

decay_modes decay_modes_of(const rmat& gamma, double sym_tol) {
  if (gamma.rows() != gamma.cols()) fail_domain("decay matrix must be square");
  const double scale = std::max(gamma.cwiseAbs().maxCoeff(), 1e-300);
  if ((gamma - gamma.transpose()).cwiseAbs().maxCoeff() > sym_tol * scale) fail_domain("decay matrix is not symmetric");
  Eigen::SelfAdjointEigenSolver<rmat> es(0.5 * (gamma + gamma.transpose()));
  const Eigen::Index n = gamma.rows();
  decay_modes out;
  out.rates.resize(n);
  out.modes.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index src = n - 1 - i;
    out.rates[i] = es.eigenvalues()[src];
    out.modes.row(i) = es.eigenvectors().col(src).transpose().cast<cplx>();
  }
  return out;
}

int numerical_rank(const rvec& rates, double threshold) {
  return static_cast<int>((rates.array() > threshold).count());
}

int count_superradiant(const rvec& rates, double single_rate) {
  return static_cast<int>((rates.array() > single_rate).count());
}

namespace {

std::vector<double> shell_rates(const platform& p, int range) {
  const vec3 d = platform_dipole(p);
  const vec3 a0 = site_position(p, 0, 0);
  std::vector<double> g(range + 1);
  g[0] = self_decay(p);
  for (int m = 1; m <= range; ++m) g[m] = pair_decay(p, d, a0, site_position(p, m, 0));
  return g;
}

/// sum_{m=-range}^{range} c(m) e^{i k m a} for c(m) = c(-m), i.e. c0 + 2 sum c_m cos(k m a).
double cosine_series(const std::vector<double>& c, double ka) {
  const cplx step = std::polar(1.0, ka);
  cplx e = step;
  double s = 0.0;
  for (size_t m = 1; m < c.size(); ++m) {
    s += c[m] * e.real();
    e *= step;
    if (m % 64 == 0) e = std::polar(1.0, ka * static_cast<double>(m + 1));
  }
  return c[0] + 2.0 * s;
}

}  // namespace

decay_profile momentum_decay_profile(const platform& p, const rvec& k_grid, int range, double tail_tol) {
  if (range < 8) fail_config("decay profile range must be at least 8 shells");
  decay_profile out;
  out.k = k_grid;
  out.range = range;
  const std::vector<double> g = shell_rates(p, range);
  for (int m = range - 7; m <= range; ++m) out.last_shell = std::max(out.last_shell, 2.0 * std::abs(g[m]));
  const double ref = std::abs(self_decay(p));
  if (out.last_shell > tail_tol * std::max(ref, 1e-300)) {
    std::ostringstream msg;
    msg << "decay profile tail not converged: last-shell contribution " << out.last_shell << " at range " << range;
    const double grow = out.last_shell / (tail_tol * ref);
    if (std::isfinite(grow) && grow < 1e3) {
      msg << "; suggested range " << static_cast<long long>(std::ceil(range * grow * 1.5));
    } else {
      msg << "; the shell rates do not decay, no finite range converges";
    }
    fail_numerical(msg.str());
  }
  const double a = cell_length(p);
  out.rate.resize(k_grid.size());
  parallel_for(static_cast<int>(k_grid.size()), [&](int j) { out.rate[j] = cosine_series(g, k_grid[j] * a); });
  return out;
}

Eigen::Matrix2cd bloch_decay_matrix(const platform& p, double k, int range) {
  const vec3 d = platform_dipole(p);
  const vec3 a0 = site_position(p, 0, 0);
  const double a = cell_length(p);
  const std::vector<double> g = shell_rates(p, range);
  const double gaa = cosine_series(g, k * a);
  cplx gab(0.0, 0.0);
  for (int m = -range; m <= range; ++m) gab += pair_decay(p, d, a0, site_position(p, m, 1)) * std::polar(1.0, k * m * a);
  Eigen::Matrix2cd out;
  out << gaa, gab, std::conj(gab), gaa;
  return out;
}

decay_fit effective_decay_rate(const pump_trajectory& tr, double period) {
  decay_fit fit;
  std::vector<double> ts, ys;
  for (size_t i = 0; i < tr.t.size() && tr.t[i] <= period * (1.0 + 1e-12); ++i) {
    if (tr.norm[i] < 1e-12) {
      fit.warnings.push_back({tr.t[i], "norm reached numerical zero; fit window truncated"});
      break;
    }
    ts.push_back(tr.t[i]);
    ys.push_back(-std::log(tr.norm[i]));
  }
  fit.points = static_cast<int>(ts.size());
  if (fit.points < 2) fail_numerical("effective_decay_rate: fewer than two usable samples");
  const double n = fit.points;
  const double mt = std::accumulate(ts.begin(), ts.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0;
  for (size_t i = 0; i < ts.size(); ++i) {
    sxy += (ts[i] - mt) * (ys[i] - my);
    sxx += (ts[i] - mt) * (ts[i] - mt);
  }
  fit.rate = sxy / sxx;
  return fit;
}

double predicted_decay_rate(const rvec& f_sq, const rvec& gamma_k, double a) {
  if (f_sq.size() != gamma_k.size()) fail_domain("predicted_decay_rate: grid mismatch");
  const double dk = two_pi / a / static_cast<double>(f_sq.size());
  return (f_sq.array() * gamma_k.array()).sum() * dk / (two_pi / a);
}

}  // namespace topopump
