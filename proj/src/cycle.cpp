#include "cycle.hpp"

#include <cmath>

namespace topopump {

double parameter_cycle::delta(double t) const {
  if (shape == delta_shape::constant) return delta_max;
  return delta_max * std::sin(two_pi * t / period + delta_phase);
}

double parameter_cycle::control(double t) const {
  const double mid = 0.5 * (control_min + control_max);
  const double amp = 0.5 * (control_max - control_min);
  return mid + amp * std::cos(two_pi * t / period + control_phase);
}

platform parameter_cycle::platform_at(double t) const { return with_control(base, control(t)); }

parameter_cycle parameter_cycle::reversed() const {
  parameter_cycle r = *this;
  r.delta_phase = pi - delta_phase;
  r.control_phase = -control_phase;
  return r;
}

hopping_schedule schedule_of(const parameter_cycle& c, int n_terms) {
  return [c, n_terms](double s) {
    const double t = s * c.period;
    return reference_hoppings(c.platform_at(t), n_terms, c.delta(t));
  };
}

hopping_schedule rice_mele_loop(double j0, double radius, double center_delta, double center_djbar) {
  return [=](double s) {
    hopping_set h;
    h.a = 1.0;
    h.n_terms = 1;
    h.n_cells = 2;
    h.delta = center_delta + radius * std::cos(two_pi * s);
    h.j_prime_odd = {j0 + center_djbar - radius * std::sin(two_pi * s)};
    h.j_odd = {j0};
    h.j_even = {0.0};
    return h;
  };
}

int path_winding(const hopping_schedule& sched, int n, int n_terms) {
  auto point = [&](double s) {
    const hopping_set h = sched(s);
    const auto [jbp, jb] = extended_rates(h, n_terms);
    return cplx(h.delta, jbp - jb);
  };
  double total = 0.0;
  cplx prev = point(0.0);
  for (int i = 1; i <= n; ++i) {
    const cplx cur = point(static_cast<double>(i) / n);
    if (std::abs(cur) == 0.0) fail_numerical("path passes through the degeneracy point");
    total += std::arg(cur / prev);
    prev = cur;
  }
  return static_cast<int>(std::lround(total / two_pi));
}

double critical_control(const platform& p, double lo, double hi, int n_terms) {
  auto djbar = [&](double x) {
    const auto [jbp, jb] = extended_rates(reference_hoppings(with_control(p, x), n_terms));
    return jbp - jb;
  };
  double flo = djbar(lo);
  if (flo * djbar(hi) > 0.0) fail_numerical("critical_control: no sign change of delta-J-bar in the bracket");
  for (int it = 0; it < 200 && hi - lo > 1e-14; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = djbar(mid);
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace topopump
