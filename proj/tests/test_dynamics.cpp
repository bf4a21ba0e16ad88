#include <doctest.h>

#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

#include "couplings.hpp"
#include "dynamics.hpp"
#include "propagator.hpp"

using namespace topopump;

namespace {

cvec random_state(int n, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> g;
  cvec v(n);
  for (int i = 0; i < n; ++i) v[i] = cplx(g(rng), g(rng));
  return v.normalized();
}

rmat random_symmetric(int n, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> g;
  rmat m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = g(rng);
  return 0.5 * (m + m.transpose());
}

/// exp(-i t H) psi from the spectral decomposition, computed here independently.
cvec spectral_evolve(const rmat& H, const cvec& psi, double t) {
  Eigen::SelfAdjointEigenSolver<rmat> es(H);
  const cmat v = es.eigenvectors().cast<cplx>();
  cvec c = v.adjoint() * psi;
  for (int i = 0; i < c.size(); ++i) c[i] *= std::polar(1.0, -t * es.eigenvalues()[i]);
  return v * c;
}

parameter_cycle rydberg_cycle() {
  parameter_cycle c;
  c.base = rydberg_params{};
  c.period = 30.0;
  c.delta_max = 7.0;
  c.control_min = 0.02;
  c.control_max = 0.2;
  return c;
}

}  // namespace

TEST_CASE("Krylov exponential agrees with the spectral oracle") {
  const rmat H = random_symmetric(80, 3);
  const cvec psi = random_state(80, 4);
  const linear_map apply = [&](const cvec& x, cvec& y) { y = H.cast<cplx>() * x; };
  krylov_stats st;
  const cvec y = expm_krylov(apply, psi, 0.05, true, {}, &st);
  CHECK((y - spectral_evolve(H, psi, 0.05)).norm() < 1e-12);
  CHECK(st.dim > 0);
  CHECK((expm_dense_hermitian(H, psi, 0.05) - spectral_evolve(H, psi, 0.05)).norm() < 1e-12);
}

TEST_CASE("non-Hermitian Krylov exponential agrees with the dense exponential") {
  const rmat H = random_symmetric(60, 5);
  rmat G = random_symmetric(60, 6);
  G = G * G.transpose() / 60.0;  // positive semidefinite decay
  const cmat A = H.cast<cplx>() - cplx(0.0, 0.5) * G.cast<cplx>();
  const cvec psi = random_state(60, 7);
  const linear_map apply = [&](const cvec& x, cvec& y) { y = A * x; };
  const cvec y = expm_krylov(apply, psi, 0.05, false);
  CHECK((y - expm_dense(A, psi, 0.05)).norm() < 1e-11);
  CHECK(y.norm() <= 1.0 + 1e-12);
}

TEST_CASE("chain Hamiltonian equals direct assembly, with and without disorder") {
  const parameter_cycle c = rydberg_cycle();
  const int n = 24;
  std::vector<vec3> offsets;
  std::mt19937 rng(1);
  std::normal_distribution<double> g(0.0, 0.01);
  for (int i = 0; i < n; ++i) offsets.emplace_back(g(rng), g(rng), g(rng));
  for (double t : {0.0, 7.3, 21.0}) {
    const platform p = c.platform_at(t);
    chain_geometry geo = build_geometry(p, n);
    rmat expected = build_hamiltonian(build_coupling_matrices(geo).v, c.delta(t));
    CHECK((chain_model(c, n).hamiltonian_at(t) - expected).cwiseAbs().maxCoeff() < 1e-12);
    for (int i = 0; i < n; ++i) geo.positions[i] += offsets[i];
    expected = build_hamiltonian(build_coupling_matrices(geo).v, c.delta(t));
    CHECK((chain_model(c, n, offsets).hamiltonian_at(t) - expected).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("decay matrix of the chain equals the platform decay matrix") {
  parameter_cycle c;
  c.base = free_space_params{};
  c.period = 60.0;
  c.delta_max = 4.0;
  c.control_min = 0.1;
  c.control_max = 0.8;
  const rmat expected = build_coupling_matrices(build_geometry(c.platform_at(13.0), 20)).gamma;
  CHECK((chain_model(c, 20).decay_at(13.0) - expected).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("static cycle evolution matches the exact exponential") {
  parameter_cycle c = rydberg_cycle();
  c.shape = delta_shape::constant;
  c.delta_max = 1.5;
  c.control_max = c.control_min;
  const int n = 40;
  const cvec psi = random_state(n, 9);
  evolve_options opt;
  opt.steps_per_cycle = 50;
  opt.monitor_terms = 0;
  const pump_trajectory tr = evolve(psi, chain_model(c, n), opt);
  const rmat H = build_hamiltonian(build_coupling_matrices(build_geometry(c.platform_at(0.0), n)).v, 1.5);
  CHECK((tr.final_state() - spectral_evolve(H, psi, c.period)).norm() < 1e-10);
}

TEST_CASE("midpoint stepping converges at second order") {
  const parameter_cycle c = rydberg_cycle();
  const int n = 40;
  const cvec psi = random_state(n, 2);
  const chain_model chain(c, n);
  auto run = [&](int steps) {
    evolve_options opt;
    opt.steps_per_cycle = steps;
    opt.monitor_terms = 0;
    return evolve(psi, chain, opt).final_state();
  };
  const cvec ref = run(3200);
  const double e1 = (run(100) - ref).norm(), e2 = (run(200) - ref).norm();
  CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.15));
}

TEST_CASE("wave packet is normalized, localized and translates by whole cells") {
  const parameter_cycle c = rydberg_cycle();
  wavepacket_spec ws;
  ws.w_k = two_pi / 16.0;
  const int n = 128;
  const wavepacket wp = build_wavepacket(c, ws, n);
  CHECK(wp.psi.norm() == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(wp.center_cell == 32);
  CHECK(fidelity(wp, 0.0, wp.psi) == doctest::Approx(1.0).epsilon(1e-13));
  const cvec moved = wp.shifted(3.0);
  for (int i = 0; i + 6 < n; ++i) CHECK(std::abs(moved[i + 6] - wp.psi[i]) < 1e-12);
  const rvec x = chain_model(c, n).coordinates_at(0.0);
  const double com0 = center_of_mass(wp.psi, x);
  CHECK(center_of_mass(moved, x) == doctest::Approx(com0 + 3.0).epsilon(1e-9));
}

TEST_CASE("short chain is rejected for a narrow packet") {
  wavepacket_spec ws;
  CHECK_THROWS_AS(build_wavepacket(rydberg_cycle(), ws, 120), error);
}

TEST_CASE("center of mass is the density-weighted coordinate") {
  cvec psi(4);
  psi << cplx(1, 0), cplx(0, 1), cplx(0, 0), cplx(1, 1);
  rvec x(4);
  x << 0.0, 1.0, 2.0, 3.0;
  CHECK(center_of_mass(psi, x) == doctest::Approx((0.0 + 1.0 + 0.0 + 2.0 * 3.0) / 4.0));
}

TEST_CASE("Hermitian pumping conserves the norm and moves the packet") {
  const parameter_cycle c = rydberg_cycle();
  wavepacket_spec ws;
  ws.w_k = two_pi / 20.0;
  const int n = 160;
  const wavepacket wp = build_wavepacket(c, ws, n);
  evolve_options opt;
  opt.steps_per_cycle = 200;
  opt.snapshots_per_cycle = 4;
  opt.monitor_terms = 0;
  const pump_trajectory tr = evolve(wp.psi, chain_model(c, n), opt);
  CHECK(tr.max_norm_drift < 1e-9);
  CHECK(tr.snapshots.size() == 5);
  CHECK(tr.t.size() == 201);
  CHECK(tr.com.back() - tr.com.front() > 0.8);
}
