#pragma once

#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "common.hpp"
#include "couplings.hpp"

namespace topopump {

/// Extended Rice-Mele rates. Index p-1 of each array holds the p-th rate:
///   j_prime_odd[p-1] = J'_{2p-1}  (A_q -> B_{q+p-1})
///   j_odd[p-1]       = J_{2p-1}   (B_q -> A_{q+p})
///   j_even[p-1]      = J_{2p}     (A_q -> A_{q+p}, B_q -> B_{q+p})
/// Arrays may cover every separation of an open chain; n_terms selects how many
/// of them enter the momentum-space sums.
struct hopping_set {
  std::vector<double> j_prime_odd;
  std::vector<double> j_odd;
  std::vector<double> j_even;
  double delta = 0.0;
  int n_cells = 0;
  double a = 1.0;
  int n_terms = 0;
};

enum class lattice_sum { truncated, cesaro };

/// How momentum-space lattice sums are evaluated. Cesaro weights (P - p + 1)/P
/// average the partial sums, which tames the non-decaying waveguide tails.
struct lattice_sum_options {
  lattice_sum kind = lattice_sum::truncated;
  int n_terms = 0;  ///< 0 keeps the hopping set's own n_terms
};

struct bloch_matrix {
  double n0 = 0.0;
  cplx n{0.0, 0.0};
  double delta = 0.0;
  double k = 0.0;

  /// 2x2 Bloch Hamiltonian in the (A, B) basis for Bloch waves e^{i k q a}.
  Eigen::Matrix2cd matrix() const;
};

/// Rates of an infinite chain from a reference cell, p = 1..n_terms.
hopping_set reference_hoppings(const platform& p, int n_terms, double delta = 0.0);

/// Extracts the three rate families from an assembled coupling matrix and checks
/// that every pair of the chain matches the rate of its cell separation.
hopping_set classify_hoppings(const rmat& v, int n_sites, double delta, double a, double rel_tol = 1e-9);

/// Open-chain single-excitation Hamiltonian from rates (all pairs up to the chain length).
rmat build_hamiltonian(const hopping_set& h, int n_sites);
/// Open-chain Hamiltonian from couplings plus the alternating +delta / -delta diagonal.
rmat build_hamiltonian(const rmat& v, double delta);

bloch_matrix make_bloch(const hopping_set& h, double k, const lattice_sum_options& opt = {});

/// (E_minus, E_plus) in ascending order.
std::pair<double, double> band_energies(const bloch_matrix& bm);

/// Normalized band eigenvector (band 0 = lower); the B component is real and non-negative.
Eigen::Vector2cd band_vector(const bloch_matrix& bm, int band);

/// (J-bar', J-bar): alternating sums over p = 1..n_terms.
std::pair<double, double> extended_rates(const hopping_set& h, int n_terms = 0);

/// Left-hand sides of the gap-closing conditions at k = pi/a and k = 0.
std::pair<double, double> gap_closure_residuals(const hopping_set& h, int n_terms = 0);

struct winding_result {
  int winding = 0;
  double residual = 0.0;  ///< distance of the accumulated phase / 2 pi from the integer
  int grid = 0;
};

winding_result winding_number(const hopping_set& h, double gap_tol = 1e-10, double sym_tol = 1e-10);

}  // namespace topopump
