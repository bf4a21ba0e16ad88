#pragma once

#include <vector>

#include "couplings.hpp"
#include "dynamics.hpp"

namespace topopump {

/// Collective jump modes of a decay matrix. Row k of modes holds the coefficients M_kj.
struct decay_modes {
  rvec rates;  ///< descending
  cmat modes;
};

decay_modes decay_modes_of(const rmat& gamma, double sym_tol = 1e-12);

/// Number of rates above threshold.
int numerical_rank(const rvec& rates, double threshold);

/// Modes decaying faster than a single emitter.
int count_superradiant(const rvec& rates, double single_rate);

struct decay_profile {
  rvec k;
  rvec rate;
  int range = 0;
  double last_shell = 0.0;  ///< largest |2 Gamma(m a)| over the final shells
};

/// Single-sublattice momentum profile Gamma(k) = sum_m Gamma(m a) e^{i k m a} over |m| <= range.
decay_profile momentum_decay_profile(const platform& p, const rvec& k_grid, int range = 1 << 20,
                                     double tail_tol = 1e-6);

/// Two-sublattice Bloch decay matrix in the (A, B) basis, same truncation.
Eigen::Matrix2cd bloch_decay_matrix(const platform& p, double k, int range);

struct decay_fit {
  double rate = 0.0;
  int points = 0;
  std::vector<warning_record> warnings;
};

/// Least-squares slope of -ln ||psi||^2 against t over the first cycle.
decay_fit effective_decay_rate(const pump_trajectory& tr, double period);

/// f-weighted rate sum |f|^2 Gamma(k) dk / (2 pi / a).
double predicted_decay_rate(const rvec& f_sq, const rvec& gamma_k, double a);

}  // namespace topopump
