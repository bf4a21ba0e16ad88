#include "dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace topopump {

namespace {

/// y = H x for real symmetric H: the complex vector is viewed as a 2 x N real block so one
/// real product handles both parts.
void apply_symmetric(const rmat& h, const cvec& x, cvec& y) {
  const Eigen::Index n = x.size();
  y.resize(n);
  Eigen::Map<const rmat> xr(reinterpret_cast<const double*>(x.data()), 2, n);
  Eigen::Map<rmat> yr(reinterpret_cast<double*>(y.data()), 2, n);
  yr.noalias() = xr * h;
}

/// Translation-invariant fill: rate(s, q) is the rate from A_0 to sublattice s of cell q.
template <class Rate>
rmat fill_invariant(int n_sites, Rate rate, bool same_only, bool cross_only) {
  const int m = n_sites / 2;
  rmat out = rmat::Zero(n_sites, n_sites);
  std::vector<double> aa(m, 0.0), ab(2 * m - 1, 0.0);
  if (!cross_only) {
    for (int q = 0; q < m; ++q) aa[q] = rate(0, q);
  }
  if (!same_only) {
    for (int q = -(m - 1); q < m; ++q) ab[q + m - 1] = rate(1, q);
  }
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      if (!cross_only) {
        const double s = aa[std::abs(j - i)];
        out(2 * i, 2 * j) = s;
        out(2 * i + 1, 2 * j + 1) = s;
      }
      if (!same_only) {
        out(2 * i, 2 * j + 1) = ab[j - i + m - 1];
        out(2 * i + 1, 2 * j) = ab[i - j + m - 1];
      }
    }
  }
  return out;
}

}  // namespace

chain_model::chain_model(const parameter_cycle& cycle, int n_sites, std::vector<vec3> offsets)
    : cycle_(cycle), n_sites_(n_sites), offsets_(std::move(offsets)) {
  if (n_sites < 2 || n_sites % 2 != 0) fail_domain("n_sites must be even and >= 2");
  if (!offsets_.empty() && static_cast<int>(offsets_.size()) != n_sites) {
    fail_domain("offsets must have one entry per emitter");
  }
  const chain_geometry g = geometry_at(0.0);
  static_v_ = assemble(g, false, nullptr);
  if (kind_of(cycle_.base) != platform_kind::rydberg) static_gamma_ = assemble(g, true, nullptr);
}

chain_geometry chain_model::geometry_at(double t) const {
  chain_geometry g = build_geometry(cycle_.platform_at(t), n_sites_);
  if (!offsets_.empty()) {
    for (int i = 0; i < n_sites_; ++i) g.positions[i] += offsets_[i];
  }
  return g;
}

rvec chain_model::coordinates_at(double t) const {
  const chain_geometry g = geometry_at(t);
  rvec x(n_sites_);
  for (int i = 0; i < n_sites_; ++i) x[i] = g.longitudinal(i);
  return x;
}

/// same_sublattice == nullptr assembles only the same-sublattice pairs; otherwise only the
/// cross pairs are computed and the given block is added.
rmat chain_model::assemble(const chain_geometry& g, bool decay, const rmat* same_sublattice) const {
  const bool cross = same_sublattice != nullptr;
  auto pair = [&](const vec3& ri, const vec3& rj) {
    return decay ? pair_decay(g.params, g.dipole, ri, rj) : pair_coupling(g.params, g.dipole, ri, rj);
  };
  rmat out;
  if (offsets_.empty()) {
    const platform& p = g.params;
    const vec3 a0 = site_position(p, 0, 0);
    out = fill_invariant(
        n_sites_,
        [&](int s, int q) {
          if (s == 0 && q == 0) return decay ? self_decay(p) : 0.0;
          return pair(a0, site_position(p, q, s));
        },
        !cross, cross);
  } else if (const auto* wg = std::get_if<waveguide_params>(&g.params)) {
    /// The reduced waveguide rates need only emitter angles and heights; evaluating atan2
    /// once per emitter instead of once per pair dominates the disordered assembly cost.
    rvec phi(n_sites_), z(n_sites_);
    for (int i = 0; i < n_sites_; ++i) {
      phi[i] = std::atan2(g.positions[i].y(), g.positions[i].x());
      z[i] = g.positions[i].z();
    }
    out = rmat::Zero(n_sites_, n_sites_);
    for (int i = 0; i < n_sites_; ++i) {
      if (!cross && decay) out(i, i) = wg->gamma;
      for (int j = i + 1; j < n_sites_; ++j) {
        if (((i + j) % 2 == 1) != cross) continue;
        const double dphi = phi[j] - phi[i], dz = z[j] - z[i];
        const double x = decay ? waveguide_decay(dphi, dz, wg->gamma, wg->beta)
                               : waveguide_coupling(dphi, dz, wg->gamma, wg->beta);
        out(i, j) = x;
        out(j, i) = x;
      }
    }
  } else {
    out = rmat::Zero(n_sites_, n_sites_);
    for (int i = 0; i < n_sites_; ++i) {
      if (!cross && decay) out(i, i) = self_decay(g.params);
      for (int j = i + 1; j < n_sites_; ++j) {
        if (((i + j) % 2 == 1) != cross) continue;
        if ((g.positions[i] - g.positions[j]).norm() == 0.0) {
          std::ostringstream msg;
          msg << "coincident emitters at sites " << i << " and " << j;
          fail_domain(msg.str());
        }
        const double x = pair(g.positions[i], g.positions[j]);
        out(i, j) = x;
        out(j, i) = x;
      }
    }
  }
  if (cross) out += *same_sublattice;
  return out;
}

rmat chain_model::hamiltonian_at(double t) const {
  rmat h = assemble(geometry_at(t), false, &static_v_);
  const double d = cycle_.delta(t);
  for (int i = 0; i < n_sites_; ++i) h(i, i) = (i % 2 == 0) ? d : -d;
  return h;
}

rmat chain_model::decay_at(double t) const {
  if (kind_of(cycle_.base) == platform_kind::rydberg) {
    return rmat::Identity(n_sites_, n_sites_) * self_decay(cycle_.base);
  }
  return assemble(geometry_at(t), true, &static_gamma_);
}

cvec wavepacket::shifted(double shift) const {
  const int m = static_cast<int>(k.size());
  const int n = 2 * m;
  cvec out = cvec::Zero(n);
  for (int j = 0; j < m; ++j) {
    const cplx w = weight[j] * std::polar(1.0, -k[j] * shift);
    const cplx step = std::polar(1.0, k[j] * a);
    cplx phase(1.0, 0.0);
    for (int q = 0; q < m; ++q) {
      out[2 * q] += w * phase * u[j][0];
      out[2 * q + 1] += w * phase * u[j][1];
      phase *= step;
      if (q % 64 == 63) phase = std::polar(1.0, k[j] * a * (q + 1));
    }
  }
  return out * norm_factor;
}

wavepacket build_wavepacket(const parameter_cycle& cycle, const wavepacket_spec& spec, int n_sites) {
  if (n_sites < 2 || n_sites % 2 != 0) fail_domain("n_sites must be even and >= 2");
  if (spec.w_k <= 0.0) fail_config("wavepacket w_k must be positive");
  if (spec.band != 0 && spec.band != 1) fail_config("wavepacket band must be lower or upper");
  const int m = n_sites / 2;
  wavepacket wp;
  wp.a = cell_length(cycle.base);
  wp.center_cell = spec.center_cell >= 0 ? spec.center_cell : m / 2;
  if (wp.center_cell >= m) fail_config("wavepacket center cell outside the chain");
  wp.k.resize(m);
  wp.weight.resize(m);
  wp.u.resize(m);
  const hopping_set h0 = reference_hoppings(cycle.platform_at(0.0), spec.sums.n_terms > 0 ? spec.sums.n_terms : m / 2,
                                            cycle.delta(0.0));
  const double xc = wp.center_cell * wp.a;
  for (int j = 0; j < m; ++j) {
    const double k = wrap_k(two_pi * j / (m * wp.a), wp.a);
    wp.k[j] = k;
    const double d = wrap_k(k - spec.k0, wp.a);
    wp.weight[j] = std::exp(-d * d / (2.0 * spec.w_k * spec.w_k)) * std::polar(1.0, -k * xc);
    wp.u[j] = band_vector(make_bloch(h0, k, spec.sums), spec.band);
  }
  cvec raw = wp.shifted(0.0);
  const double nrm = raw.norm();
  if (nrm == 0.0) fail_numerical("wave packet has zero norm on the commensurate grid");
  wp.norm_factor = 1.0 / nrm;
  wp.psi = raw / nrm;
  /// The support test uses the Gaussian envelope alone: long-range couplings give the band
  /// vectors small far tails that belong to the eigenstates, not to the packet.
  rvec envelope = rvec::Zero(m);
  for (int q = 0; q < m; ++q) {
    cplx s(0.0, 0.0);
    for (int j = 0; j < m; ++j) s += wp.weight[j] * std::polar(1.0, wp.k[j] * q * wp.a);
    envelope[q] = std::abs(s);
  }
  envelope /= envelope.norm();
  const double tail = std::max(envelope[0], envelope[m - 1]);
  if (tail > spec.edge_tol) {
    std::ostringstream msg;
    msg << "chain too short for packet: boundary amplitude " << tail << " exceeds " << spec.edge_tol;
    fail_domain(msg.str());
  }
  return wp;
}

double cycle_min_gap(const parameter_cycle& cycle, int n_terms, int m_t, int m_k) {
  const hopping_schedule sched = schedule_of(cycle, n_terms);
  const double a = cell_length(cycle.base);
  const lattice_sum_options sums{lattice_sum::cesaro, n_terms};
  double gmin = std::numeric_limits<double>::infinity();
  for (int i = 0; i < m_t; ++i) {
    const hopping_set h = sched(static_cast<double>(i) / m_t);
    for (int j = 0; j < m_k; ++j) {
      const auto [em, ep] = band_energies(make_bloch(h, -pi / a + two_pi / a * j / m_k, sums));
      gmin = std::min(gmin, ep - em);
    }
  }
  return gmin;
}

double center_of_mass(const cvec& psi, const rvec& x) {
  const rvec w = psi.cwiseAbs2();
  const double total = w.sum();
  if (total <= 0.0) fail_numerical("center_of_mass: zero norm");
  return w.dot(x) / total;
}

double fidelity(const wavepacket& reference, double shift, const cvec& state) {
  const cvec ref = reference.shifted(shift);
  const double nr = ref.squaredNorm(), ns = state.squaredNorm();
  if (nr == 0.0 || ns == 0.0) return 0.0;
  return std::norm(ref.dot(state)) / (nr * ns);
}

double survival_probability(const cvec& psi) { return psi.squaredNorm(); }

pump_trajectory evolve(const cvec& psi0, const chain_model& chain, const evolve_options& opt) {
  if (opt.n_cycles < 0 || opt.steps_per_cycle < 1) fail_config("evolve: need n_cycles >= 0 and steps_per_cycle >= 1");
  if (psi0.size() != chain.n_sites()) fail_domain("evolve: state size does not match the chain");
  const double period = chain.cycle().period;
  const double dt = period / opt.steps_per_cycle;
  pump_trajectory tr;
  if (opt.adiabatic_threshold > 0.0) {
    tr.min_gap = cycle_min_gap(chain.cycle(), opt.monitor_terms);
    if (tr.min_gap * period < opt.adiabatic_threshold) {
      std::ostringstream msg;
      msg << "adiabaticity margin min_gap * T = " << tr.min_gap * period << " below threshold "
          << opt.adiabatic_threshold;
      tr.warnings.push_back({0.0, msg.str()});
    }
  }
  const rvec x0 = chain.coordinates_at(0.0);
  cvec psi = psi0;
  auto record = [&](double t, const rvec& x) {
    tr.t.push_back(t);
    tr.com.push_back(center_of_mass(psi, x));
    tr.norm.push_back(psi.squaredNorm());
  };
  record(0.0, x0);
  tr.cycle_states.push_back(psi);
  const int snap_every =
      opt.snapshots_per_cycle > 0 ? std::max(1, opt.steps_per_cycle / opt.snapshots_per_cycle) : 0;
  if (snap_every) {
    tr.snapshot_t.push_back(0.0);
    tr.snapshots.push_back(psi.cwiseAbs2());
  }
  double cycle_start_norm = psi.squaredNorm();
  const bool fixed_coordinates = kind_of(chain.cycle().base) == platform_kind::waveguide;
  cvec tmp(psi.size());
  for (int c = 0; c < opt.n_cycles; ++c) {
    for (int s = 0; s < opt.steps_per_cycle; ++s) {
      /// Schedule times restart each cycle so t stays exact in [0, T].
      const double tmid = (s + 0.5) * dt;
      const rmat h = chain.hamiltonian_at(tmid);
      krylov_stats st;
      if (opt.dissipative) {
        const rmat g = chain.decay_at(tmid);
        linear_map apply = [&](const cvec& x, cvec& y) {
          apply_symmetric(h, x, y);
          apply_symmetric(g, x, tmp);
          y -= cplx(0.0, 0.5) * tmp;
        };
        psi = expm_krylov(apply, psi, dt, false, opt.krylov, &st);
      } else {
        linear_map apply = [&](const cvec& x, cvec& y) { apply_symmetric(h, x, y); };
        psi = expm_krylov(apply, psi, dt, true, opt.krylov, &st);
      }
      tr.max_krylov_dim = std::max(tr.max_krylov_dim, st.dim);
      const double tloc = (s + 1) * dt;
      const double tabs = c * period + tloc;
      record(tabs, fixed_coordinates || s + 1 == opt.steps_per_cycle ? x0 : chain.coordinates_at(tloc));
      if (snap_every && (s + 1) % snap_every == 0) {
        tr.snapshot_t.push_back(tabs);
        tr.snapshots.push_back(psi.cwiseAbs2());
      }
    }
    tr.cycle_states.push_back(psi);
    const double nrm = psi.squaredNorm();
    if (!opt.dissipative) tr.max_norm_drift = std::max(tr.max_norm_drift, std::abs(nrm - cycle_start_norm));
    cycle_start_norm = nrm;
  }
  return tr;
}

step_convergence converge_steps(const wavepacket& packet, const chain_model& chain, evolve_options opt, double tol,
                                int max_steps) {
  opt.n_cycles = 1;
  opt.snapshots_per_cycle = 0;
  opt.adiabatic_threshold = 0.0;
  auto run = [&](int steps) {
    opt.steps_per_cycle = steps;
    const pump_trajectory tr = evolve(packet.psi, chain, opt);
    return fidelity(packet, tr.com.back() - tr.com.front(), tr.final_state());
  };
  int steps = opt.steps_per_cycle;
  double f = run(steps);
  while (2 * steps <= max_steps) {
    const double f2 = run(2 * steps);
    const double change = std::abs(f2 - f);
    if (change < tol) return {steps, change};
    steps *= 2;
    f = f2;
  }
  std::ostringstream msg;
  msg << "step count did not converge below " << max_steps << " steps per cycle";
  fail_numerical(msg.str());
}

}  // namespace topopump
