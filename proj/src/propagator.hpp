#pragma once

#include <functional>

#include "common.hpp"

namespace topopump {

struct krylov_options {
  int max_dim = 64;
  double tol = 1e-14;  ///< a-posteriori error estimate relative to the input norm
};

struct krylov_stats {
  int dim = 0;
  double error_estimate = 0.0;
};

/// y = A x for the generator A.
using linear_map = std::function<void(const cvec& x, cvec& y)>;

/// exp(-i dt A) psi by Arnoldi projection; hermitian selects the Lanczos-friendly
/// eigen-decomposition of the projected matrix.
cvec expm_krylov(const linear_map& apply, const cvec& psi, double dt, bool hermitian, const krylov_options& opt = {},
                 krylov_stats* stats = nullptr);

/// exp(-i dt H) psi for real symmetric H by full diagonalization.
cvec expm_dense_hermitian(const rmat& H, const cvec& psi, double dt);

/// exp(-i dt A) psi for a general complex A (scaling and squaring).
cvec expm_dense(const cmat& A, const cvec& psi, double dt);

}  // namespace topopump
