#pragma once

#include <cstdint>
#include <vector>

#include "cycle.hpp"
#include "dynamics.hpp"

namespace topopump {

/// Quenched Gaussian positional disorder, independent per emitter and axis.
struct disorder_spec {
  vec3 sigma_r = vec3::Zero();
  int n_samples = 200;
  std::uint64_t seed = 1;
};

/// Offsets of one realization. The stream depends only on (seed, sample, attempt), so
/// realizations can be drawn in any order.
std::vector<vec3> draw_offsets(const disorder_spec& spec, int sample, int n_emitters, int attempt = 0);

/// Linearized spread of the pair distance: sqrt(2) (|r_x| s_x + |r_y| s_y + |r_z| s_z) / |r|.
double sigma_distance(const vec3& r_ij, const vec3& sigma_r);

/// |dJ/dr| sigma_rij. The derivative is taken along the pair direction, or along the chain
/// axis for the waveguide whose reduced rates depend on the longitudinal separation.
double sigma_hopping(const platform& p, const vec3& ri, const vec3& rj, double sigma_rij);

/// Printed combination sqrt(sum s_p^2 + 1/2 sum_{p != q} s_p s_q).
double sigma_delta_jbar(const std::vector<double>& sigma_components);

/// Component spreads ordered as (J'_1, J_1, J'_3, J_3, ...) for the reference cell.
std::vector<double> hopping_sigmas(const platform& p, int n_terms, const vec3& sigma_r);

/// Sampled std of delta-J-bar over disorder realizations of the reference cell.
double monte_carlo_sigma_djbar(const platform& p, int n_terms, const disorder_spec& spec);

struct integrated_disorder {
  rvec t;
  rvec djbar;
  rvec sigma_analytic;
  rvec sigma_mc;
  double delta_J = 0.0;      ///< integral of delta-J-bar
  double abs_delta_J = 0.0;  ///< integral of |delta-J-bar|
  double sigma_int_analytic = 0.0;
  double sigma_int_mc = 0.0;

  /// Path-disorder ratio; the cycle integral of delta-J-bar nearly cancels for loops around
  /// the degeneracy point, so the magnitude integral sets the scale.
  double ratio_mc() const { return sigma_int_mc / abs_delta_J; }
  double ratio_analytic() const { return sigma_int_analytic / abs_delta_J; }
};

integrated_disorder time_integrated_disorder(const parameter_cycle& cycle, const disorder_spec& spec, int n_t,
                                             int n_terms);

/// Disorder scale s such that sigma_r = s * direction reaches the target Monte-Carlo ratio.
double calibrate_sigma(const parameter_cycle& cycle, const vec3& direction, double target_ratio, int n_terms,
                       const disorder_spec& mc, int n_t = 64);

struct disorder_report {
  double fidelity_mean = 0.0;  ///< |<averaged disordered state | clean state>|^2
  double fidelity_stderr = 0.0;
  double per_realization_mean = 0.0;
  double per_realization_stderr = 0.0;
  int resampled = 0;
  std::vector<cplx> overlaps;
};

disorder_report monte_carlo_fidelity(const parameter_cycle& cycle, const wavepacket_spec& packet, int n_sites,
                                     const disorder_spec& spec, const evolve_options& evolve_opt,
                                     int bootstrap = 200);

}  // namespace topopump
