#include "couplings.hpp"

#include <cmath>
#include <sstream>

namespace topopump {

namespace {

template <class... Fs>
struct overloaded : Fs... {
  using Fs::operator()...;
};
template <class... Fs>
overloaded(Fs...) -> overloaded<Fs...>;

}  // namespace

vec3 platform_dipole(const platform& p) {
  return std::visit(overloaded{
                        [](const rydberg_params& r) { return vec3(std::cos(r.theta_m), std::sin(r.theta_m), 0.0); },
                        [](const free_space_params& f) { return vec3(std::cos(f.theta_d), std::sin(f.theta_d), 0.0); },
                        // radial dipoles; the reduced waveguide rates only need the emitter angles
                        [](const waveguide_params&) { return vec3(1.0, 0.0, 0.0); },
                    },
                    p);
}

platform_kind kind_of(const platform& p) { return static_cast<platform_kind>(p.index()); }

std::string kind_name(platform_kind k) {
  switch (k) {
    case platform_kind::rydberg:
      return "rydberg";
    case platform_kind::free_space:
      return "free_space";
    case platform_kind::waveguide:
      return "waveguide";
  }
  return "unknown";
}

double cell_length(const platform& p) {
  return std::visit([](const auto& x) { return x.a; }, p);
}

double control_value(const platform& p) {
  return std::visit(overloaded{
                        [](const rydberg_params& r) { return r.b; },
                        [](const free_space_params& f) { return f.b; },
                        [](const waveguide_params& w) { return w.phi1p; },
                    },
                    p);
}

platform with_control(const platform& p, double x) {
  platform out = p;
  std::visit(overloaded{
                 [x](rydberg_params& r) { r.b = x; },
                 [x](free_space_params& f) { f.b = x; },
                 [x](waveguide_params& w) { w.phi1p = x; },
             },
             out);
  return out;
}

vec3 site_position(const platform& p, int q, int sublattice) {
  return std::visit(overloaded{
                        [&](const rydberg_params& r) {
                          return sublattice == 0 ? vec3(q * r.a, 0.0, 0.0) : vec3(q * r.a + r.b, -r.h, 0.0);
                        },
                        [&](const free_space_params& f) {
                          return vec3(q * f.a + (sublattice == 0 ? 0.0 : f.b), 0.0, 0.0);
                        },
                        [&](const waveguide_params& w) {
                          const double phi = q * w.phi1 + (sublattice == 0 ? 0.0 : w.phi1p);
                          const double z = q * w.a + (sublattice == 0 ? 0.0 : w.b);
                          return vec3(w.rho * std::cos(phi), w.rho * std::sin(phi), z);
                        },
                    },
                    p);
}

double chain_geometry::longitudinal(int i) const {
  return kind_of(params) == platform_kind::waveguide ? positions[i].z() : positions[i].x();
}

chain_geometry build_geometry(const platform& p, int n_sites) {
  if (n_sites < 2 || n_sites % 2 != 0) fail_domain("n_sites must be even and >= 2");
  chain_geometry g;
  g.n_sites = n_sites;
  g.params = p;
  g.dipole = platform_dipole(p);
  g.positions.reserve(n_sites);
  for (int q = 0; q < n_sites / 2; ++q) {
    g.positions.push_back(site_position(p, q, 0));
    g.positions.push_back(site_position(p, q, 1));
  }
  return g;
}

double rydberg_coupling(const vec3& r, const vec3& dipole, double c3) {
  const double dist = r.norm();
  if (dist == 0.0) fail_domain("rydberg_coupling: coincident emitters");
  const double c = r.dot(dipole) / dist;
  return c3 * (3.0 * c * c - 1.0) / (dist * dist * dist);
}

double free_space_coupling(double r, double cos_theta, double gamma, double k0) {
  if (r <= 0.0) fail_domain("free_space_coupling: coincident emitters");
  const double x = k0 * r;
  const double c2 = cos_theta * cos_theta;
  const double cx = std::cos(x), sx = std::sin(x);
  return 0.75 * gamma * ((3.0 * c2 - 1.0) * (cx / (x * x * x) + sx / (x * x)) + (1.0 - c2) * cx / x);
}

double free_space_decay(double r, double cos_theta, double gamma, double k0) {
  if (r < 0.0) fail_domain("free_space_decay: negative distance");
  const double x = k0 * r;
  const double c2 = cos_theta * cos_theta;
  if (x < 0.5) {
    // power series of sin/x^3 - cos/x^2 and sin/x, free of the small-x cancellation
    double radial = 0.0, transverse = 0.0;
    double xp = 1.0, fact = 1.0;  // x^(2n-2) and (2n+1)!
    for (int n = 1; n <= 12; ++n) {
      fact *= (2.0 * n) * (2.0 * n + 1.0);
      const double sign = (n % 2 == 1) ? 1.0 : -1.0;
      radial += sign * 2.0 * n * xp / fact;
      transverse += sign * (2.0 * n + 1.0) * (2.0 * n) * xp / fact;
      xp *= x * x;
    }
    return 1.5 * gamma * ((3.0 * c2 - 1.0) * radial + (1.0 - c2) * transverse);
  }
  const double cx = std::cos(x), sx = std::sin(x);
  return 1.5 * gamma * ((3.0 * c2 - 1.0) * (sx / (x * x * x) - cx / (x * x)) + (1.0 - c2) * sx / x);
}

double waveguide_coupling(double phi_ij, double z_ij, double gamma, double beta) {
  return 0.5 * gamma * std::cos(phi_ij) * std::sin(beta * std::abs(z_ij));
}

double waveguide_decay(double phi_ij, double z_ij, double gamma, double beta) {
  return gamma * std::cos(phi_ij) * std::cos(beta * z_ij);
}

double pair_coupling(const platform& p, const vec3& dipole, const vec3& ri, const vec3& rj) {
  const vec3 r = rj - ri;
  return std::visit(overloaded{
                        [&](const rydberg_params& ry) { return rydberg_coupling(r, dipole, ry.c3); },
                        [&](const free_space_params& f) {
                          const double dist = r.norm();
                          if (dist == 0.0) fail_domain("free_space_coupling: coincident emitters");
                          return free_space_coupling(dist, r.dot(dipole) / dist, f.gamma, f.k0());
                        },
                        [&](const waveguide_params& w) {
                          const double phi = std::atan2(rj.y(), rj.x()) - std::atan2(ri.y(), ri.x());
                          return waveguide_coupling(phi, r.z(), w.gamma, w.beta);
                        },
                    },
                    p);
}

double pair_decay(const platform& p, const vec3& dipole, const vec3& ri, const vec3& rj) {
  const vec3 r = rj - ri;
  return std::visit(overloaded{
                        [](const rydberg_params&) { return 0.0; },
                        [&](const free_space_params& f) {
                          const double dist = r.norm();
                          const double c = dist > 0.0 ? r.dot(dipole) / dist : 0.0;
                          return free_space_decay(dist, c, f.gamma, f.k0());
                        },
                        [&](const waveguide_params& w) {
                          const double phi = std::atan2(rj.y(), rj.x()) - std::atan2(ri.y(), ri.x());
                          return waveguide_decay(phi, r.z(), w.gamma, w.beta);
                        },
                    },
                    p);
}

double self_decay(const platform& p) {
  return std::visit(overloaded{
                        [](const rydberg_params& r) { return r.decay_rate; },
                        [](const free_space_params& f) { return f.gamma; },
                        [](const waveguide_params& w) { return w.gamma; },
                    },
                    p);
}

rmat build_coupling_v(const chain_geometry& geom) {
  const int n = geom.n_sites;
  rmat v = rmat::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if ((geom.positions[i] - geom.positions[j]).norm() == 0.0) {
        std::ostringstream msg;
        msg << "coincident emitters at sites " << i << " and " << j;
        fail_domain(msg.str());
      }
      const double vij = pair_coupling(geom.params, geom.dipole, geom.positions[i], geom.positions[j]);
      v(i, j) = vij;
      v(j, i) = vij;
    }
  }
  return v;
}

coupling_matrices build_coupling_matrices(const chain_geometry& geom, bool with_gamma) {
  coupling_matrices out;
  out.v = build_coupling_v(geom);
  const int n = geom.n_sites;
  if (!with_gamma) return out;
  out.gamma = rmat::Zero(n, n);
  const double self = self_decay(geom.params);
  for (int i = 0; i < n; ++i) {
    out.gamma(i, i) = self;
    for (int j = i + 1; j < n; ++j) {
      const double gij = pair_decay(geom.params, geom.dipole, geom.positions[i], geom.positions[j]);
      out.gamma(i, j) = gij;
      out.gamma(j, i) = gij;
    }
  }
  return out;
}

std::pair<double, double> rydberg_nn_rates(const rydberg_params& p) {
  const double r1p = std::hypot(p.b, p.h);
  const double r1 = std::hypot(p.a - p.b, p.h);
  const double cos1p = (p.b * std::cos(p.theta_m) - p.h * std::sin(p.theta_m)) / r1p;
  const double cos1 = ((p.a - p.b) * std::cos(p.theta_m) + p.h * std::sin(p.theta_m)) / r1;
  const double j1p = p.c3 * (3.0 * cos1p * cos1p - 1.0) / (r1p * r1p * r1p);
  const double j1 = p.c3 * (3.0 * cos1 * cos1 - 1.0) / (r1 * r1 * r1);
  return {j1p, j1};
}

double free_space_min_j2_angle(double a_over_lambda) {
  const double x = two_pi * a_over_lambda;
  const double near = std::cos(x) / (x * x * x) + std::sin(x) / (x * x);
  const double far = std::cos(x) / x;
  // J_2 ∝ c^2 (3 near - far) + (far - near)
  const double slope = 3.0 * near - far;
  const double offset = far - near;
  double c2 = slope != 0.0 ? -offset / slope : 0.0;
  if (!(c2 >= 0.0 && c2 <= 1.0)) {
    c2 = std::abs(offset) <= std::abs(slope + offset) ? 0.0 : 1.0;
  }
  return std::acos(std::sqrt(c2));
}

}  // namespace topopump
