#include "rice_mele.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace topopump {

namespace {

int terms_of(const hopping_set& h, int n_terms) {
  const int avail = static_cast<int>(std::max({h.j_prime_odd.size(), h.j_odd.size(), h.j_even.size()}));
  int p = n_terms > 0 ? n_terms : h.n_terms;
  if (p <= 0) p = avail;
  return p;
}

double at(const std::vector<double>& v, int p) { return p >= 1 && p <= static_cast<int>(v.size()) ? v[p - 1] : 0.0; }

}  // namespace

Eigen::Matrix2cd bloch_matrix::matrix() const {
  Eigen::Matrix2cd m;
  // A row couples to B through conj(n): the A_q amplitude collects J'_{2p-1} e^{+ik(p-1)a} and J_{2p-1} e^{-ikpa}
  m << cplx(n0 + delta, 0.0), std::conj(n), n, cplx(n0 - delta, 0.0);
  return m;
}

hopping_set reference_hoppings(const platform& p, int n_terms, double delta) {
  hopping_set h;
  h.delta = delta;
  h.a = cell_length(p);
  h.n_terms = n_terms;
  h.n_cells = 2 * n_terms;
  const vec3 d = platform_dipole(p);
  const vec3 a0 = site_position(p, 0, 0);
  const vec3 b0 = site_position(p, 0, 1);
  h.j_prime_odd.resize(n_terms);
  h.j_odd.resize(n_terms);
  h.j_even.resize(n_terms);
  for (int q = 1; q <= n_terms; ++q) {
    h.j_prime_odd[q - 1] = pair_coupling(p, d, a0, site_position(p, q - 1, 1));
    h.j_odd[q - 1] = pair_coupling(p, d, b0, site_position(p, q, 0));
    h.j_even[q - 1] = pair_coupling(p, d, a0, site_position(p, q, 0));
  }
  return h;
}

hopping_set classify_hoppings(const rmat& v, int n_sites, double delta, double a, double rel_tol) {
  if (n_sites % 2 != 0 || v.rows() != n_sites || v.cols() != n_sites) fail_domain("classify_hoppings: bad dimensions");
  const int m = n_sites / 2;
  hopping_set h;
  h.delta = delta;
  h.a = a;
  h.n_cells = m;
  h.n_terms = n_sites / 4;
  auto A = [](int q) { return 2 * q; };
  auto B = [](int q) { return 2 * q + 1; };
  h.j_prime_odd.resize(m);
  h.j_odd.resize(std::max(m - 1, 0));
  h.j_even.resize(std::max(m - 1, 0));
  for (int p = 1; p <= m; ++p) h.j_prime_odd[p - 1] = v(A(0), B(p - 1));
  for (int p = 1; p < m; ++p) {
    h.j_odd[p - 1] = v(B(0), A(p));
    h.j_even[p - 1] = v(A(0), A(p));
  }
  const double scale = std::max(v.cwiseAbs().maxCoeff(), 1e-300);
  auto check = [&](double value, double ref, int i, int j) {
    if (std::abs(value - ref) > rel_tol * scale) {
      std::ostringstream msg;
      msg << "classify_hoppings: translation invariance violated at pair (" << i << ", " << j << ")";
      fail_domain(msg.str());
    }
  };
  for (int q = 0; q < m; ++q) {
    for (int s = q; s < m; ++s) {
      check(v(A(q), B(s)), h.j_prime_odd[s - q], A(q), B(s));
      if (s > q) {
        check(v(B(q), A(s)), h.j_odd[s - q - 1], B(q), A(s));
        check(v(A(q), A(s)), h.j_even[s - q - 1], A(q), A(s));
        check(v(B(q), B(s)), h.j_even[s - q - 1], B(q), B(s));
      }
    }
  }
  return h;
}

rmat build_hamiltonian(const hopping_set& h, int n_sites) {
  if (n_sites % 2 != 0) fail_domain("build_hamiltonian: odd number of sites");
  const int m = n_sites / 2;
  rmat H = rmat::Zero(n_sites, n_sites);
  auto put = [&H](int i, int j, double x) {
    H(i, j) += x;
    H(j, i) += x;
  };
  for (int q = 0; q < m; ++q) {
    H(2 * q, 2 * q) = h.delta;
    H(2 * q + 1, 2 * q + 1) = -h.delta;
    for (int p = 1; q + p - 1 < m; ++p) put(2 * q, 2 * (q + p - 1) + 1, at(h.j_prime_odd, p));
    for (int p = 1; q + p < m; ++p) {
      put(2 * q + 1, 2 * (q + p), at(h.j_odd, p));
      put(2 * q, 2 * (q + p), at(h.j_even, p));
      put(2 * q + 1, 2 * (q + p) + 1, at(h.j_even, p));
    }
  }
  return H;
}

rmat build_hamiltonian(const rmat& v, double delta) {
  if (v.rows() % 2 != 0) fail_domain("build_hamiltonian: odd number of sites");
  rmat H = v;
  for (int i = 0; i < v.rows(); ++i) H(i, i) = (i % 2 == 0) ? delta : -delta;
  return H;
}

bloch_matrix make_bloch(const hopping_set& h, double k, const lattice_sum_options& opt) {
  const int P = terms_of(h, opt.n_terms);
  bloch_matrix bm;
  bm.delta = h.delta;
  bm.k = k;
  const cplx step = std::polar(1.0, k * h.a);
  cplx e_p = step;                // e^{ikpa}
  cplx e_pm1(1.0, 0.0);           // e^{ik(p-1)a}
  cplx n(0.0, 0.0);
  double n0 = 0.0;
  for (int p = 1; p <= P; ++p) {
    const double w = opt.kind == lattice_sum::cesaro ? static_cast<double>(P - p + 1) / P : 1.0;
    n += w * (at(h.j_odd, p) * e_p + at(h.j_prime_odd, p) * std::conj(e_pm1));
    n0 += w * 2.0 * at(h.j_even, p) * e_p.real();
    e_pm1 = e_p;
    e_p *= step;
    if (p % 64 == 0) {
      // resynchronize the recurrence to keep phase error at machine level
      e_p = std::polar(1.0, k * h.a * (p + 1));
      e_pm1 = std::polar(1.0, k * h.a * p);
    }
  }
  bm.n = n;
  bm.n0 = n0;
  return bm;
}

std::pair<double, double> band_energies(const bloch_matrix& bm) {
  const double r = std::sqrt(std::norm(bm.n) + bm.delta * bm.delta);
  return {bm.n0 - r, bm.n0 + r};
}

Eigen::Vector2cd band_vector(const bloch_matrix& bm, int band) {
  const double r = std::sqrt(std::norm(bm.n) + bm.delta * bm.delta);
  const double d = bm.delta;
  Eigen::Vector2cd u;
  if (band == 0) {
    // (h - E_-) u = 0 with h = [[d, n*], [n, -d]] + n0
    if (d >= 0.0) {
      u << -std::conj(bm.n), cplx(r + d, 0.0);
    } else {
      u << cplx(r - d, 0.0), -bm.n;
      // rotate so the B component is real and non-negative
      if (std::abs(bm.n) > 0.0) u *= -std::conj(bm.n) / std::abs(bm.n);
    }
  } else {
    if (d <= 0.0) {
      u << std::conj(bm.n), cplx(r - d, 0.0);
    } else {
      u << cplx(r + d, 0.0), bm.n;
      if (std::abs(bm.n) > 0.0) u *= std::conj(bm.n) / std::abs(bm.n);
    }
  }
  const double nrm = u.norm();
  if (nrm == 0.0) {
    // fully degenerate point; any orthonormal pair is an eigenbasis
    u << (band == 0 ? cplx(0.0, 0.0) : cplx(1.0, 0.0)), (band == 0 ? cplx(1.0, 0.0) : cplx(0.0, 0.0));
    return u;
  }
  return u / nrm;
}

std::pair<double, double> extended_rates(const hopping_set& h, int n_terms) {
  const int P = terms_of(h, n_terms);
  double jbp = 0.0, jb = 0.0;
  for (int p = 1; p <= P; ++p) {
    const double s = (p % 2 == 1) ? 1.0 : -1.0;
    jbp += s * at(h.j_prime_odd, p);
    jb += s * at(h.j_odd, p);
  }
  return {jbp, jb};
}

std::pair<double, double> gap_closure_residuals(const hopping_set& h, int n_terms) {
  const int P = terms_of(h, n_terms);
  double res_pi = 0.0, res_0 = 0.0;
  for (int p = 1; p <= P; ++p) {
    const double s = (p % 2 == 1) ? 1.0 : -1.0;
    res_pi += s * (at(h.j_prime_odd, p) - at(h.j_odd, p));
    res_0 += at(h.j_prime_odd, p) + at(h.j_odd, p);
  }
  return {res_pi, res_0};
}

winding_result winding_number(const hopping_set& h, double gap_tol, double sym_tol) {
  const int P = terms_of(h, 0);
  double scale = 0.0;
  for (int p = 1; p <= P; ++p) scale = std::max({scale, std::abs(at(h.j_prime_odd, p)), std::abs(at(h.j_odd, p))});
  if (scale == 0.0) fail_numerical("winding undefined at gap closure");
  if (std::abs(h.delta) > sym_tol * scale) fail_domain("winding number requires delta = 0");
  for (int p = 1; p <= P; ++p) {
    if (std::abs(at(h.j_even, p)) > sym_tol * scale) fail_domain("sublattice symmetry broken");
  }
  auto accumulate = [&](int grid) {
    double total = 0.0;
    cplx prev = make_bloch(h, -pi / h.a).n;
    for (int i = 1; i <= grid; ++i) {
      const double k = -pi / h.a + two_pi / h.a * i / grid;
      const cplx cur = make_bloch(h, k).n;
      if (std::abs(cur) < gap_tol * scale) fail_numerical("winding undefined at gap closure");
      total += std::arg(cur / prev);
      prev = cur;
    }
    return total / two_pi;
  };
  winding_result res;
  int grid = 1024;
  double w = accumulate(grid);
  for (int it = 0; it < 6; ++it) {
    const double w2 = accumulate(2 * grid);
    grid *= 2;
    const bool stable = std::lround(w) == std::lround(w2);
    w = w2;
    if (stable) break;
  }
  res.winding = static_cast<int>(std::lround(w));
  res.residual = std::abs(w - res.winding);
  res.grid = grid;
  return res;
}

}  // namespace topopump
