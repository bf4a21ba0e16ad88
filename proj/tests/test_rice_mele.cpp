#include <doctest.h>

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "rice_mele.hpp"

using namespace topopump;

namespace {

hopping_set random_set(int P, unsigned seed, double delta) {
  hopping_set h;
  h.a = 1.0;
  h.delta = delta;
  h.n_terms = P;
  h.n_cells = 2 * P;
  std::srand(seed);
  auto r = [] { return 2.0 * std::rand() / RAND_MAX - 1.0; };
  for (int p = 1; p <= P; ++p) {
    h.j_prime_odd.push_back(r() / (p * p));
    h.j_odd.push_back(r() / (p * p));
    h.j_even.push_back(r() / (p * p * p));
  }
  return h;
}

/// Ring of m cells assembled directly from the hopping definitions.
rmat ring_hamiltonian(const hopping_set& h, int m) {
  rmat H = rmat::Zero(2 * m, 2 * m);
  auto A = [m](int q) { return 2 * (((q % m) + m) % m); };
  auto B = [m](int q) { return 2 * (((q % m) + m) % m) + 1; };
  auto link = [&](int i, int j, double v) {
    H(i, j) += v;
    H(j, i) += v;
  };
  for (int q = 0; q < m; ++q) {
    H(A(q), A(q)) = h.delta;
    H(B(q), B(q)) = -h.delta;
    for (int p = 1; p <= h.n_terms; ++p) {
      link(A(q), B(q + p - 1), h.j_prime_odd[p - 1]);
      link(B(q), A(q + p), h.j_odd[p - 1]);
      link(A(q), A(q + p), h.j_even[p - 1]);
      link(B(q), B(q + p), h.j_even[p - 1]);
    }
  }
  return H;
}

}  // namespace

TEST_CASE("bloch bands reproduce the ring spectrum") {
  const int m = 24;
  const hopping_set h = random_set(5, 7, 0.3);
  Eigen::SelfAdjointEigenSolver<rmat> es(ring_hamiltonian(h, m));
  std::vector<double> bloch;
  for (int j = 0; j < m; ++j) {
    const auto [lo, hi] = band_energies(make_bloch(h, two_pi * j / m));
    bloch.push_back(lo);
    bloch.push_back(hi);
  }
  std::sort(bloch.begin(), bloch.end());
  for (int i = 0; i < 2 * m; ++i) CHECK(es.eigenvalues()[i] == doctest::Approx(bloch[i]).epsilon(1e-12));
}

TEST_CASE("band vectors are normalized eigenvectors of the Bloch matrix") {
  const hopping_set h = random_set(4, 3, -0.2);
  for (double k : {-3.0, -1.0, 0.0, 0.7, 2.9}) {
    const bloch_matrix bm = make_bloch(h, k);
    const auto [lo, hi] = band_energies(bm);
    for (int band : {0, 1}) {
      const Eigen::Vector2cd u = band_vector(bm, band);
      CHECK(u.norm() == doctest::Approx(1.0).epsilon(1e-14));
      const double e = band == 0 ? lo : hi;
      CHECK((bm.matrix() * u - e * u).norm() < 1e-12);
    }
  }
}

TEST_CASE("open-chain assembly round-trips through classification") {
  const hopping_set h = random_set(3, 11, 0.1);
  const rmat H = build_hamiltonian(h, 20);
  const hopping_set back = classify_hoppings(H - rmat(H.diagonal().asDiagonal()), 20, 0.1, 1.0);
  for (int p = 1; p <= 3; ++p) {
    CHECK(back.j_prime_odd[p - 1] == doctest::Approx(h.j_prime_odd[p - 1]));
    CHECK(back.j_odd[p - 1] == doctest::Approx(h.j_odd[p - 1]));
    CHECK(back.j_even[p - 1] == doctest::Approx(h.j_even[p - 1]));
  }
  CHECK(H(0, 0) == doctest::Approx(0.1));
  CHECK(H(1, 1) == doctest::Approx(-0.1));
}

TEST_CASE("gap closing conditions match the Bloch off-diagonal at k = 0 and pi") {
  const hopping_set h = random_set(6, 5, 0.0);
  const auto [res_pi, res_0] = gap_closure_residuals(h);
  CHECK(std::abs(make_bloch(h, 0.0).n) == doctest::Approx(std::abs(res_0)).epsilon(1e-12));
  CHECK(std::abs(make_bloch(h, pi).n) == doctest::Approx(std::abs(res_pi)).epsilon(1e-12));
  const auto [jbp, jb] = extended_rates(h);
  CHECK(res_pi == doctest::Approx(jbp - jb));
}

TEST_CASE("SSH winding number is 1 only when the intercell rate dominates") {
  hopping_set h;
  h.a = 1.0;
  h.n_terms = 1;
  h.j_prime_odd = {0.4};
  h.j_odd = {1.0};
  h.j_even = {0.0};
  CHECK(std::abs(winding_number(h).winding) == 1);
  h.j_prime_odd = {1.0};
  h.j_odd = {0.4};
  CHECK(winding_number(h).winding == 0);
  h.j_odd = {1.0};
  CHECK_THROWS_AS(winding_number(h), error);
}

TEST_CASE("cesaro weights reduce to truncation for one term") {
  const hopping_set h = random_set(1, 2, 0.0);
  const auto t = make_bloch(h, 0.8, {lattice_sum::truncated, 1});
  const auto c = make_bloch(h, 0.8, {lattice_sum::cesaro, 1});
  CHECK(std::abs(t.n - c.n) < 1e-15);
}
