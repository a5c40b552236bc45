#pragma once

// Independent reference computations used only by the tests.

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace oracle {

inline constexpr double pi = std::numbers::pi;

inline double sine_mode(int n, double x, double origin, double width) {
  return std::sqrt(2.0 / width) * std::sin(pi * n * (x - origin) / width);
}

/// Adaptive Gauss-Kronrod integral of f over [a, b].
inline double integrate(const std::function<double(double)>& f, double a, double b) {
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 15, 1e-14);
}

/// Overlap of mode n of well (o1, w1) with mode m of well (o2, w2), by quadrature
/// over the intersection.
inline double mode_overlap(int n, double o1, double w1, int m, double o2, double w2) {
  const double lo = std::max(o1, o2);
  const double hi = std::min(o1 + w1, o2 + w2);
  if (!(hi > lo)) return 0.0;
  return integrate(
      [&](double x) { return sine_mode(n, x, o1, w1) * sine_mode(m, x, o2, w2); }, lo, hi);
}

/// Sine coefficients of samples taken at the K midpoints (j + 1/2) w / K of a
/// well. Exact for band-limited data with n <= K (DST-II orthogonality).
inline std::vector<std::complex<double>> midpoint_sine_coefficients(
    const std::vector<std::complex<double>>& samples, double width, int modes) {
  const int K = static_cast<int>(samples.size());
  std::vector<std::complex<double>> out(modes);
  for (int n = 1; n <= modes; ++n) {
    std::complex<double> acc{};
    for (int j = 0; j < K; ++j) {
      const double x = (j + 0.5) * width / K;
      acc += samples[j] * sine_mode(n, x, 0.0, width);
    }
    out[n - 1] = acc * (width / K);
  }
  return out;
}

}  // namespace oracle
