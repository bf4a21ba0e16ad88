#include "propagator.hpp"

#include <cmath>

#include <unsupported/Eigen/MatrixFunctions>

namespace topopump {

namespace {

/// exp(-i dt H) for the small projected matrix.
cmat small_exp(const cmat& h, double dt, bool hermitian) {
  if (hermitian) {
    /// For a Hermitian generator the projection is real tridiagonal up to roundoff: the
    /// diagonal holds real expectation values and the subdiagonal the basis norms.
    const Eigen::Index m = h.rows();
    const rvec diag = h.diagonal().real();
    rvec sub(std::max<Eigen::Index>(m - 1, 0));
    for (Eigen::Index i = 0; i + 1 < m; ++i) sub[i] = 0.5 * (h(i + 1, i).real() + h(i, i + 1).real());
    Eigen::SelfAdjointEigenSolver<rmat> es;
    es.computeFromTridiagonal(diag, sub);
    const cvec phases = (es.eigenvalues().cast<cplx>().array() * cplx(0.0, -dt)).exp();
    const cmat v = es.eigenvectors().cast<cplx>();
    return v * phases.asDiagonal() * v.transpose();
  }
  const cmat arg = cplx(0.0, -dt) * h;
  return arg.exp();
}

}  // namespace

cvec expm_krylov(const linear_map& apply, const cvec& psi, double dt, bool hermitian, const krylov_options& opt,
                 krylov_stats* stats) {
  const Eigen::Index n = psi.size();
  const double beta = psi.norm();
  if (beta == 0.0 || dt == 0.0) return psi;
  const int m_max = static_cast<int>(std::min<Eigen::Index>(opt.max_dim, n));

  cmat basis(n, m_max + 1);
  cmat h = cmat::Zero(m_max + 1, m_max);
  basis.col(0) = psi / beta;
  cvec w(n);
  cmat e;
  int m = 0;
  double err = 0.0;
  for (int j = 0; j < m_max; ++j) {
    apply(basis.col(j), w);
    /// Two passes of Gram-Schmidt keep the basis orthonormal to roundoff.
    for (int pass = 0; pass < 2; ++pass) {
      for (int i = 0; i <= j; ++i) {
        const cplx c = basis.col(i).dot(w);
        h(i, j) += c;
        w -= c * basis.col(i);
      }
    }
    const double next = w.norm();
    h(j + 1, j) = next;
    m = j + 1;
    const bool breakdown = next < 1e-13 * beta;
    /// The projected exponential is only re-evaluated every other step once the basis is sizable.
    if (breakdown || m == m_max || m < 4 || m % 2 == 0) {
      e = small_exp(h.topLeftCorner(m, m), dt, hermitian);
      err = breakdown ? 0.0 : next * std::abs(e(m - 1, 0));
      if (breakdown || err < opt.tol) break;
    }
    basis.col(j + 1) = w / next;
  }
  if (e.rows() != m) e = small_exp(h.topLeftCorner(m, m), dt, hermitian);
  if (stats) {
    stats->dim = m;
    stats->error_estimate = err;
  }
  if (err > std::max(opt.tol, 1e-9)) fail_numerical("Krylov exponential did not converge within the basis limit");
  return beta * (basis.leftCols(m) * e.col(0));
}

cvec expm_dense_hermitian(const rmat& H, const cvec& psi, double dt) {
  Eigen::SelfAdjointEigenSolver<rmat> es(H);
  const rmat& v = es.eigenvectors();
  const cvec phases = (es.eigenvalues().cast<cplx>().array() * cplx(0.0, -dt)).exp();
  const cvec c = v.transpose().cast<cplx>() * psi;
  return v.cast<cplx>() * (phases.array() * c.array()).matrix();
}

cvec expm_dense(const cmat& A, const cvec& psi, double dt) {
  const cmat arg = cplx(0.0, -dt) * A;
  return arg.exp() * psi;
}

}  // namespace topopump
