#pragma once

#include "rimsa/types.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace rimsa::detail {

// Smallest multiplier >= 0 whose solution meets the power budget, assuming
// power(solve(m)) decreases monotonically in m. Terminates when the power is
// within rel_tol * budget of the budget or the bracket collapses, always
// returning a feasible solution. The default tolerance is far below the
// 1e-6 contract so alternating optimizations do not wobble at the plateau.
template <typename Solve, typename Power>
std::pair<double, MatC> min_power_multiplier(const Solve& solve, const Power& power, double budget,
                                             double rel_tol = 1e-10,
                                             double interval_tol = 1e-12) {
  MatC w0 = solve(0.0);
  if (power(w0) <= budget) return {0.0, std::move(w0)};

  double hi = 1.0;
  MatC w_hi = solve(hi);
  while (power(w_hi) > budget) {
    hi *= 2.0;
    if (!std::isfinite(hi))
      throw std::runtime_error("min_power_multiplier: power never drops below the budget");
    w_hi = solve(hi);
  }
  double lo = hi > 1.0 ? hi / 2.0 : 0.0;

  while (hi - lo >= interval_tol) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;  // bracket exhausted at double precision
    MatC w_mid = solve(mid);
    const double p = power(w_mid);
    if (std::abs(p - budget) <= rel_tol * budget) return {mid, std::move(w_mid)};
    if (p > budget) {
      lo = mid;
    } else {
      hi = mid;
      w_hi = std::move(w_mid);
    }
  }
  return {hi, std::move(w_hi)};
}

}  // namespace rimsa::detail
