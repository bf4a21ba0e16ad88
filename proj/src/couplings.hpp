#pragma once

#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "common.hpp"

namespace topopump {

/// Rydberg chain: sublattice A at (q a, 0, 0), sublattice B at (q a + b, -h, 0),
/// all dipoles along (cos theta_m, sin theta_m, 0). Rates in units of c3 / a^3.
struct rydberg_params {
  double c3 = 1.0;
  double a = 1.0;
  double h = 7.4 / 12.0;
  double b = 0.16;
  double theta_m = magic_angle;
  double decay_rate = 0.0;  ///< independent single-atom decay
};

/// Collinear chain of two-level atoms in free space. Rates in units of gamma.
struct free_space_params {
  double gamma = 1.0;
  double a = 1.0;
  double a_over_lambda = 0.7;
  double b = 0.5;
  double theta_d = pi / 2;

  double k0() const { return two_pi * a_over_lambda / a; }
};

/// Atoms on a helix around a waveguide with radial dipoles.
/// A_q sits at angle q phi1 and height q a, B_q at angle q phi1 + phi1p and height q a + b.
struct waveguide_params {
  double gamma = 1.0;
  double a = 1.0;
  double beta = pi;
  double b = 0.5;
  double phi1 = pi / 2;
  double phi1p = pi / 4;
  double rho = 1.0;
};

using platform = std::variant<rydberg_params, free_space_params, waveguide_params>;

enum class platform_kind { rydberg, free_space, waveguide };

platform_kind kind_of(const platform& p);
std::string kind_name(platform_kind k);
double cell_length(const platform& p);

/// The cycle-controlled geometric parameter: b for Rydberg and free space, phi1p for the waveguide.
double control_value(const platform& p);
platform with_control(const platform& p, double x);

vec3 platform_dipole(const platform& p);

/// Position of an emitter in cell q on sublattice 0 (A) or 1 (B).
vec3 site_position(const platform& p, int q, int sublattice);

struct chain_geometry {
  int n_sites = 0;
  std::vector<vec3> positions;
  vec3 dipole = vec3::UnitX();
  platform params;

  int cells() const { return n_sites / 2; }
  /// Coordinate along the chain axis (x, or z for the waveguide).
  double longitudinal(int i) const;
};

chain_geometry build_geometry(const platform& p, int n_sites);

struct coupling_matrices {
  rmat v;
  rmat gamma;
};

double rydberg_coupling(const vec3& r, const vec3& dipole, double c3);
double free_space_coupling(double r, double cos_theta, double gamma, double k0);
double free_space_decay(double r, double cos_theta, double gamma, double k0);
double waveguide_coupling(double phi_ij, double z_ij, double gamma, double beta);
double waveguide_decay(double phi_ij, double z_ij, double gamma, double beta);

/// Coherent rate between two emitters at the given positions.
double pair_coupling(const platform& p, const vec3& dipole, const vec3& ri, const vec3& rj);
/// Dissipative rate between two distinct emitters.
double pair_decay(const platform& p, const vec3& dipole, const vec3& ri, const vec3& rj);
/// Diagonal of the dissipative matrix.
double self_decay(const platform& p);

coupling_matrices build_coupling_matrices(const chain_geometry& geom, bool with_gamma = true);
rmat build_coupling_v(const chain_geometry& geom);

/// Nearest-neighbor pair (J'_1, J_1) from the closed-form Rydberg expressions.
std::pair<double, double> rydberg_nn_rates(const rydberg_params& p);

/// Dipole angle theta_d in [0, pi/2] minimizing |J_2| at same-sublattice distance a.
/// J_2 is linear in cos^2 theta_d, so this is an exact zero whenever one exists.
double free_space_min_j2_angle(double a_over_lambda);

}  // namespace topopump
