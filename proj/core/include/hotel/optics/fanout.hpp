#pragma once

// Phase grating exp(i arctan(2 mu cos(2 pi x / period))) that splits a beam
// into diffraction orders -1, 0, +1 of equal power when mu is tuned.

#include <complex>
#include <map>
#include <vector>

namespace hotel::optics {

/// Root of |c0| = |c1| for the arctan grating, to double precision.
inline constexpr double kBalancedMu = 1.3285896437639582;

struct FanoutConfig {
  double mu = 1.32859;
  int copies = 3;
  double period = 1.0;
};

void validate(const FanoutConfig& c);

/// arctan(2 mu cos(2 pi x / period)); independent of y.
double fanout_grating_phase(double x, const FanoutConfig& c) noexcept;

/// Fourier-series coefficients c_k of exp(i phase) over one period, for
/// |k| <= max_order. The phase is smooth and periodic, so a 4096-point
/// trapezoid sum is exact to rounding.
std::map<int, std::complex<double>> fanout_order_coefficients(const FanoutConfig& c,
                                                              int max_order = 0);

/// max / min - 1 over the magnitudes of the `copies` central orders.
double fanout_imbalance(double mu, int copies = 3);

/// The mu in [lo, hi] where |c0| and |c1| cross (bracketing root finder).
double balance_mu(double lo = 1.2, double hi = 1.45);

/// Imbalance on a uniform mu grid and its minimizer, refined by Brent.
struct MuScan {
  std::vector<double> mu;
  std::vector<double> imbalance;
  double best_mu = 0.0;
  double best_imbalance = 0.0;
};
MuScan scan_mu(double lo, double hi, int points);

/// arg(c_k) for each used order; the corrector applies the conjugate.
std::map<int, double> fanout_phase_correction(const FanoutConfig& c);

/// Fraction of the power carried by the used orders.
double fanout_efficiency(const FanoutConfig& c);

}  // namespace hotel::optics
