#pragma once

#include <cmath>
#include <numbers>

namespace hotel {

// Trig functions taking their argument in units of pi. The argument is
// reduced to [-1, 1] before scaling, so integer multiples stay exact.

inline double reduce_pi_units(double q) noexcept { return q - 2.0 * std::nearbyint(0.5 * q); }

inline double sinpi(double q) noexcept {
  const double r = reduce_pi_units(q);
  if (r == 0.0 || r == 1.0 || r == -1.0) return 0.0;
  return std::sin(std::numbers::pi * r);
}

inline double cospi(double q) noexcept {
  const double r = reduce_pi_units(q);
  if (r == 0.5 || r == -0.5) return 0.0;
  return std::cos(std::numbers::pi * r);
}

/// sin(pi q) / (pi q), equal to 1 at q = 0.
inline double sincpi(double q) noexcept {
  if (q == 0.0) return 1.0;
  return sinpi(q) / (std::numbers::pi * q);
}

}  // namespace hotel
