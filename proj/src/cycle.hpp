#pragma once

#include <functional>

#include "couplings.hpp"
#include "rice_mele.hpp"

namespace topopump {

enum class delta_shape { sine, constant };

/// Pump cycle over one period T.
///   Delta(t) = delta_max sin(2 pi t / T + delta_phase)   (or delta_max when constant)
///   x(t)     = x_mid + x_amp cos(2 pi t / T + control_phase)
/// where x is the platform's geometric control and x_mid, x_amp follow from the endpoints.
struct parameter_cycle {
  platform base;
  double period = 1.0;
  double delta_max = 1.0;
  double delta_phase = pi / 2;
  delta_shape shape = delta_shape::sine;
  double control_min = 0.0;
  double control_max = 0.0;
  double control_phase = -pi / 2;

  double delta(double t) const;
  double control(double t) const;
  platform platform_at(double t) const;
  /// Same loop traversed in the opposite direction.
  parameter_cycle reversed() const;
};

/// Hopping set of the infinite chain at normalized time s = t / T.
using hopping_schedule = std::function<hopping_set(double s)>;

hopping_schedule schedule_of(const parameter_cycle& c, int n_terms);

/// Nearest-neighbor Rice-Mele loop: Delta = r cos(2 pi s), J' = j0 - r sin(2 pi s), J = j0.
hopping_schedule rice_mele_loop(double j0, double radius, double center_delta = 0.0, double center_djbar = 0.0);

/// Winding of the path (Delta(s), delta-J-bar(s)) around the origin, sampled on n points.
int path_winding(const hopping_schedule& sched, int n = 512, int n_terms = 0);

/// Control value in [lo, hi] where delta-J-bar changes sign (bisection).
double critical_control(const platform& p, double lo, double hi, int n_terms);

}  // namespace topopump
