#include "hotel/optics/fanout.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include "hotel/error.hpp"

namespace hotel::optics {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kSamples = 4096;

std::complex<double> coefficient(double mu, int k) {
  std::complex<double> acc{0.0, 0.0};
  for (int j = 0; j < kSamples; ++j) {
    const double t = 2.0 * kPi * j / kSamples;
    acc += std::polar(1.0, std::atan(2.0 * mu * std::cos(t)) - k * t);
  }
  return acc / static_cast<double>(kSamples);
}

}  // namespace

void validate(const FanoutConfig& c) {
  if (!(c.mu > 0.0)) throw DomainError("fan-out mu must be positive");
  if (c.copies < 1 || c.copies % 2 == 0) throw DomainError("fan-out copies must be odd");
  if (!(c.period > 0.0)) throw DomainError("fan-out period must be positive");
}

double fanout_grating_phase(double x, const FanoutConfig& c) noexcept {
  return std::atan(2.0 * c.mu * std::cos(2.0 * kPi * x / c.period));
}

std::map<int, std::complex<double>> fanout_order_coefficients(const FanoutConfig& c,
                                                              int max_order) {
  validate(c);
  const int top = std::max(max_order, c.copies / 2);
  std::map<int, std::complex<double>> out;
  for (int k = -top; k <= top; ++k) out[k] = coefficient(c.mu, k);
  return out;
}

double fanout_imbalance(double mu, int copies) {
  FanoutConfig c;
  c.mu = mu;
  c.copies = copies;
  const auto coeffs = fanout_order_coefficients(c);
  double lo = INFINITY;
  double hi = 0.0;
  for (int k = -copies / 2; k <= copies / 2; ++k) {
    const double m = std::abs(coeffs.at(k));
    lo = std::min(lo, m);
    hi = std::max(hi, m);
  }
  return hi / lo - 1.0;
}

double balance_mu(double lo, double hi) {
  auto diff = [](double mu) { return std::abs(coefficient(mu, 0)) - std::abs(coefficient(mu, 1)); };
  if (diff(lo) * diff(hi) > 0.0) throw DomainError("balance_mu: no crossing in the bracket");
  boost::math::tools::eps_tolerance<double> tol(50);
  std::uintmax_t iters = 100;
  const auto [a, b] = boost::math::tools::toms748_solve(diff, lo, hi, tol, iters);
  return 0.5 * (a + b);
}

MuScan scan_mu(double lo, double hi, int points) {
  if (points < 3 || !(hi > lo)) throw DomainError("scan_mu needs hi > lo and >= 3 points");
  MuScan s;
  std::size_t best = 0;
  for (int i = 0; i < points; ++i) {
    const double mu = lo + (hi - lo) * i / (points - 1);
    s.mu.push_back(mu);
    s.imbalance.push_back(fanout_imbalance(mu));
    if (s.imbalance.back() < s.imbalance[best]) best = s.mu.size() - 1;
  }
  const double step = (hi - lo) / (points - 1);
  const double a = std::max(lo, s.mu[best] - step);
  const double b = std::min(hi, s.mu[best] + step);
  const auto r = boost::math::tools::brent_find_minima(
      [](double mu) { return fanout_imbalance(mu); }, a, b, 50);
  s.best_mu = r.first;
  s.best_imbalance = r.second;
  return s;
}

std::map<int, double> fanout_phase_correction(const FanoutConfig& c) {
  const auto coeffs = fanout_order_coefficients(c);
  std::map<int, double> out;
  for (int k = -c.copies / 2; k <= c.copies / 2; ++k) out[k] = std::arg(coeffs.at(k));
  return out;
}

double fanout_efficiency(const FanoutConfig& c) {
  const auto coeffs = fanout_order_coefficients(c);
  double p = 0.0;
  for (int k = -c.copies / 2; k <= c.copies / 2; ++k) p += std::norm(coeffs.at(k));
  return p;
}

}  // namespace hotel::optics
