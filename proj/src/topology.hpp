#pragma once

#include <cstdint>
#include <vector>

#include "cycle.hpp"
#include "rice_mele.hpp"

namespace topopump {

struct berry_options {
  int m_t = 256;
  int m_k = 256;
  int band = 0;  ///< 0 lower, 1 upper
  lattice_sum_options sums;
  double gap_tol = 1e-10;  ///< relative to the largest gap on the grid
  bool auto_refine = false;
  int max_grid = 4096;
  std::uint64_t gauge_seed = 0;  ///< nonzero: multiply every eigenvector by a random phase
};

/// Berry data on the (t, k) torus. Plaquette (i, j) spans s_i..s_{i+1} and k_j..k_{j+1};
/// flux(i, j) is the curvature integrated over that cell.
struct berry_field {
  int m_t = 0;
  int m_k = 0;
  double a = 1.0;
  rmat flux;
  rvec k_nodes;  ///< k_j = -pi/a + j dk
  rvec k_mid;    ///< cell centers k_j + dk/2, where w_k lives
  rvec w_k;      ///< time-integrated curvature (length units)
  rvec gamma_k;  ///< Wilson-loop Berry phase at k_nodes, unwrapped from k = -pi/a
  double chern_raw = 0.0;
  int chern = 0;
  double max_plaquette = 0.0;
  double min_gap = 0.0;

  double dk() const { return two_pi / a / m_k; }
  /// Curvature density flux / (ds dk) at cell (i, j), with s = t / T.
  double omega_density(int i, int j) const { return flux(i, j) * m_t / dk(); }
};

berry_field berry_curvature_grid(const hopping_schedule& sched, double a, const berry_options& opt);

/// Berry phase of the band around the closed t-loop at each k, unwrapped in k.
rvec berry_phase_profile(const hopping_schedule& sched, const rvec& k_grid, const berry_options& opt);

/// Largest |W_k + d gamma / dk| over interior cells, with the derivative taken as the
/// forward difference between the nodes bounding each cell.
double curvature_phase_mismatch(const berry_field& field);

/// Normalized Gaussian |f(k)|^2 = exp(-(k - k0)^2 / w^2), periodically wrapped, with sum |f|^2 dk = 2 pi / a.
rvec gaussian_f_sq(const rvec& k, double k0, double w_k, double a);
/// Uniform band filling, |f|^2 = 1.
rvec uniform_f_sq(const rvec& k);

/// Center-of-mass displacement per cycle from the curvature and the momentum distribution.
double predicted_displacement(const berry_field& field, const rvec& f_sq);

/// (max - min) / |mean| of w over k in [lo, hi].
double flatness_metric(const rvec& k, const rvec& w, double lo, double hi);

struct jump {
  int index = 0;     ///< between samples index and index + 1
  double k = 0.0;    ///< midpoint of the two samples
  double size = 0.0;
  double ratio = 0.0;  ///< size over the neighboring finite-difference scale
};

/// Jumps of a sampled profile that exceed factor times the median neighboring increment.
std::vector<jump> detect_jumps(const rvec& k, const rvec& w, double factor = 10.0, int window = 8);

}  // namespace topopump
