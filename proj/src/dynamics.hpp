#pragma once

#include <string>
#include <vector>

#include "couplings.hpp"
#include "cycle.hpp"
#include "propagator.hpp"
#include "rice_mele.hpp"

namespace topopump {

/// Emitter chain driven through a parameter cycle, optionally with frozen positional offsets.
/// Same-sublattice couplings do not depend on the cycle control (sublattice B moves rigidly),
/// so they are assembled once.
class chain_model {
 public:
  chain_model(const parameter_cycle& cycle, int n_sites, std::vector<vec3> offsets = {});

  const parameter_cycle& cycle() const { return cycle_; }
  int n_sites() const { return n_sites_; }
  bool disordered() const { return !offsets_.empty(); }
  const std::vector<vec3>& offsets() const { return offsets_; }

  chain_geometry geometry_at(double t) const;
  /// Longitudinal site coordinates at time t.
  rvec coordinates_at(double t) const;
  /// V(t) plus the alternating +Delta(t), -Delta(t) diagonal.
  rmat hamiltonian_at(double t) const;
  /// Collective decay matrix at time t.
  rmat decay_at(double t) const;

 private:
  rmat assemble(const chain_geometry& g, bool decay, const rmat* same_sublattice) const;

  parameter_cycle cycle_;
  int n_sites_ = 0;
  std::vector<vec3> offsets_;
  rmat static_v_;
  rmat static_gamma_;
};

struct wavepacket_spec {
  double k0 = 0.0;
  double w_k = two_pi / 100.0;
  int band = 0;
  int center_cell = -1;  ///< -1 centers the packet at cell N/4
  lattice_sum_options sums{lattice_sum::cesaro, 400};
  double edge_tol = 1e-6;
};

/// Band-projected Gaussian packet and the k-space data needed to shift it.
struct wavepacket {
  cvec psi;
  rvec k;         ///< commensurate grid, k_m = 2 pi m / (M a) wrapped into the FBZ
  cvec weight;    ///< f(k) including the centering phase, before global normalization
  std::vector<Eigen::Vector2cd> u;
  double a = 1.0;
  int center_cell = 0;
  double norm_factor = 1.0;

  /// Same packet translated by shift (any real length) via a k-space phase ramp.
  cvec shifted(double shift) const;
};

wavepacket build_wavepacket(const parameter_cycle& cycle, const wavepacket_spec& spec, int n_sites);

struct warning_record {
  double t = 0.0;
  std::string message;
};

struct evolve_options {
  int n_cycles = 1;
  int steps_per_cycle = 400;
  bool dissipative = false;
  krylov_options krylov;
  int snapshots_per_cycle = 0;  ///< site densities stored at evenly spaced instants
  double adiabatic_threshold = 0.0;  ///< warn when min gap times T falls below this
  int monitor_terms = 400;
};

struct pump_trajectory {
  std::vector<double> t;
  std::vector<double> com;
  std::vector<double> norm;
  std::vector<cvec> cycle_states;  ///< state at t = n T, n = 0..n_cycles
  std::vector<double> snapshot_t;
  std::vector<rvec> snapshots;     ///< |psi_j|^2 at snapshot_t
  std::vector<warning_record> warnings;
  double min_gap = 0.0;  ///< smallest Bloch gap met along the cycle (when monitored)
  double max_norm_drift = 0.0;  ///< Hermitian runs: largest |norm - norm(0)| per cycle
  int max_krylov_dim = 0;

  const cvec& final_state() const { return cycle_states.back(); }
};

pump_trajectory evolve(const cvec& psi0, const chain_model& chain, const evolve_options& opt);

/// Smallest band gap of the infinite chain on a (t, k) grid over one cycle.
double cycle_min_gap(const parameter_cycle& cycle, int n_terms, int m_t = 64, int m_k = 128);

double center_of_mass(const cvec& psi, const rvec& x);

/// Shape fidelity between the shifted reference and the state, normalized by both norms.
double fidelity(const wavepacket& reference, double shift, const cvec& state);

double survival_probability(const cvec& psi);

struct step_convergence {
  int steps = 0;
  double change = 0.0;
};

/// Doubles steps_per_cycle from opt until one-cycle F(T) changes by less than tol.
step_convergence converge_steps(const wavepacket& packet, const chain_model& chain, evolve_options opt,
                                double tol = 1e-6, int max_steps = 1 << 14);

}  // namespace topopump
