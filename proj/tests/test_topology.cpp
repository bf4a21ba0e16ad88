#include <doctest.h>

#include <cmath>

#include "config.hpp"
#include "cycle.hpp"
#include "topology.hpp"

using namespace topopump;

namespace {

/// Unit d-vector of H = d . sigma for the nearest-neighbor loop, H = [[D, n*], [n, -D]].
vec3 d_hat(double s, double k, double j0, double r) {
  const double jp = j0 - r * std::sin(two_pi * s);
  const std::complex<double> n = jp + j0 * std::exp(std::complex<double>(0.0, k));
  const vec3 d(n.real(), n.imag(), r * std::cos(two_pi * s));
  return d.normalized();
}

/// Lower-band curvature Omega_sk = 1/2 d.(d_s x d_k), integrated over s, by central differences.
double analytic_w(double k, double j0, double r, int n_s) {
  const double hs = 1e-5, hk = 1e-5;
  double total = 0.0;
  for (int i = 0; i < n_s; ++i) {
    const double s = (i + 0.5) / n_s;
    const vec3 d = d_hat(s, k, j0, r);
    const vec3 ds = (d_hat(s + hs, k, j0, r) - d_hat(s - hs, k, j0, r)) / (2 * hs);
    const vec3 dk = (d_hat(s, k + hk, j0, r) - d_hat(s, k - hk, j0, r)) / (2 * hk);
    total += 0.5 * d.dot(ds.cross(dk)) / n_s;
  }
  return total;
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

TEST_CASE("nearest-neighbor Rice-Mele loop pumps one cell") {
  berry_options bo;
  bo.m_t = 128;
  bo.m_k = 128;
  const berry_field f = berry_curvature_grid(rice_mele_loop(1.0, 0.5), 1.0, bo);
  CHECK(f.chern == 1);
  CHECK(std::abs(f.chern_raw - 1.0) < 1e-6);
  CHECK(predicted_displacement(f, uniform_f_sq(f.k_mid)) == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(path_winding(rice_mele_loop(1.0, 0.5)) != 0);
}

/// The plaquette sum over a k-cell is the cell average of the curvature integral.
double cell_average_w(double k_lo, double dk, double j0, double r) {
  const int n = 16;
  double total = 0.0;
  for (int i = 0; i < n; ++i) total += analytic_w(k_lo + (i + 0.5) * dk / n, j0, r, 1024) / n;
  return total;
}

TEST_CASE("integrated curvature matches the d-vector solid angle") {
  berry_options bo;
  bo.m_t = 256;
  bo.m_k = 64;
  const berry_field f = berry_curvature_grid(rice_mele_loop(1.0, 0.5), 1.0, bo);
  for (int j = 0; j < f.m_k; j += 7) {
    CHECK(f.w_k[j] == doctest::Approx(cell_average_w(f.k_nodes[j], f.dk(), 1.0, 0.5)).epsilon(1e-4));
  }
}

TEST_CASE("loop that misses the degeneracy point does not pump") {
  berry_options bo;
  bo.m_t = 64;
  bo.m_k = 64;
  const auto loop = rice_mele_loop(1.0, 0.3, 0.0, 0.8);
  CHECK(path_winding(loop) == 0);
  const berry_field f = berry_curvature_grid(loop, 1.0, bo);
  CHECK(f.chern == 0);
  CHECK(std::abs(predicted_displacement(f, uniform_f_sq(f.k_mid))) < 1e-6);
}

TEST_CASE("reversing the cycle flips the Chern number") {
  const parameter_cycle c = rydberg_cycle();
  berry_options bo;
  bo.m_t = 128;
  bo.m_k = 128;
  bo.sums = {lattice_sum::cesaro, 100};
  const berry_field f = berry_curvature_grid(schedule_of(c, 100), 1.0, bo);
  const berry_field r = berry_curvature_grid(schedule_of(c.reversed(), 100), 1.0, bo);
  CHECK(f.chern != 0);
  CHECK(r.chern == -f.chern);
  for (int j = 0; j < f.m_k; ++j) CHECK(r.w_k[j] == doctest::Approx(-f.w_k[j]).epsilon(1e-9));
}

TEST_CASE("random eigenvector phases leave Berry quantities unchanged") {
  const parameter_cycle c = rydberg_cycle();
  berry_options bo;
  bo.m_t = 64;
  bo.m_k = 64;
  bo.sums = {lattice_sum::cesaro, 50};
  const berry_field f = berry_curvature_grid(schedule_of(c, 50), 1.0, bo);
  bo.gauge_seed = 99;
  const berry_field g = berry_curvature_grid(schedule_of(c, 50), 1.0, bo);
  CHECK((f.flux - g.flux).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((f.gamma_k - g.gamma_k).cwiseAbs().maxCoeff() < 1e-10);
  CHECK(f.chern == g.chern);
}

TEST_CASE("grid doubling keeps the Chern number") {
  const parameter_cycle c = rydberg_cycle();
  berry_options bo;
  bo.m_t = 64;
  bo.m_k = 64;
  bo.sums = {lattice_sum::cesaro, 50};
  const int c1 = berry_curvature_grid(schedule_of(c, 50), 1.0, bo).chern;
  bo.m_t = bo.m_k = 128;
  CHECK(berry_curvature_grid(schedule_of(c, 50), 1.0, bo).chern == c1);
}

TEST_CASE("curvature is the k-derivative of the Berry phase") {
  berry_options bo;
  bo.m_t = 128;
  bo.m_k = 128;
  const berry_field f = berry_curvature_grid(rice_mele_loop(1.0, 0.5), 1.0, bo);
  CHECK(curvature_phase_mismatch(f) < 5.0 / f.m_k * f.w_k.cwiseAbs().maxCoeff());
}

TEST_CASE("Berry phase follows the continuous branch through sharp curvature") {
  /// At the waveguide light lines single k columns carry more than pi of flux, where
  /// nearest-branch unwrapping would be off by 2 pi.
  const experiment_config cfg = resolve(platform_preset("waveguide"));
  berry_options bo = cfg.berry_opts();
  bo.m_t = 64;
  bo.m_k = 512;
  bo.auto_refine = false;
  const berry_field f = berry_curvature_grid(schedule_of(cfg.cycle, cfg.sums.n_terms), cfg.a(), bo);
  CHECK(f.w_k.cwiseAbs().maxCoeff() * f.dk() > pi);
  CHECK(curvature_phase_mismatch(f) < 1e-9);
}

TEST_CASE("Gaussian momentum weight is normalized to the zone length") {
  rvec k(400);
  for (int j = 0; j < 400; ++j) k[j] = -pi / 2 + pi * (j + 0.5) / 400;
  const rvec f = gaussian_f_sq(k, 0.3, 0.2, 2.0);
  CHECK(f.sum() * (pi / 400) == doctest::Approx(pi).epsilon(1e-12));
  CHECK(f.maxCoeff() == f[static_cast<int>((0.3 + pi / 2) / pi * 400)]);
}

TEST_CASE("jump detector finds a step and ignores smooth data") {
  rvec k(256), w(256);
  for (int j = 0; j < 256; ++j) {
    k[j] = -pi + two_pi * j / 256;
    w[j] = std::sin(k[j]) + (k[j] > 1.0 && k[j] < 2.0 ? 0.5 : 0.0);
  }
  const auto jumps = detect_jumps(k, w);
  REQUIRE(jumps.size() == 2);
  CHECK(std::abs(jumps[0].k - 1.0) < two_pi / 256);
  CHECK(std::abs(jumps[1].k - 2.0) < two_pi / 256);
  for (int j = 0; j < 256; ++j) w[j] = std::sin(k[j]);
  CHECK(detect_jumps(k, w).empty());
}
