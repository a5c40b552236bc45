#include "hotel/optics/sorter.hpp"

#include <cmath>
#include <numbers>

#include "hotel/error.hpp"

namespace hotel::optics {

namespace {

constexpr double kPi = std::numbers::pi;

// Multiply by exp(sign * i * phase(x, y)) using the field's own coordinates.
template <class Phase>
Field2D masked(const Field2D& e, double sign, Phase phase) {
  Field2D out = e;
  for (std::size_t j = 0; j < e.nx(); ++j) {
    const double x = e.x(j);
    for (std::size_t i = 0; i < e.ny(); ++i) {
      auto& z = out.samples(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      z *= std::polar(1.0, sign * phase(x, e.y(i)));
    }
  }
  return out;
}

}  // namespace

void validate(const SorterConfig& c) {
  if (!(c.a > 0.0) || !(c.b > 0.0) || !(c.f > 0.0) || !(c.wavelength > 0.0)) {
    throw DomainError("sorter a, b, f and wavelength must be positive");
  }
}

SorterConfig default_sorter(const GridSpec& g, const Ring& ring, std::size_t strip_pixels,
                            double wavelength) {
  validate(g);
  if (strip_pixels == 0 || strip_pixels > g.n) throw DomainError("strip must fit in the grid");
  SorterConfig c;
  c.wavelength = wavelength;
  c.f = static_cast<double>(g.n) * g.pitch * g.pitch / wavelength;
  const double du = wavelength * c.f / (static_cast<double>(g.n) * g.pitch);
  c.a = static_cast<double>(strip_pixels) * du / (2.0 * kPi);
  c.b = ring.radius;
  validate(c);
  return c;
}

double sorter_phase1(double x, double y, const SorterConfig& c) noexcept {
  const double k = 2.0 * kPi / (c.wavelength * c.f);
  const double r = std::hypot(x, y);
  // the log term vanishes with x at the origin; take the limit
  const double log_term = r > 0.0 ? x * std::log(r / c.b) : 0.0;
  return c.a * k * (y * std::atan2(y, x) - log_term + x);
}

double sorter_phase2(double u, double v, const SorterConfig& c) noexcept {
  const double k = 2.0 * kPi / (c.wavelength * c.f);
  return -c.a * c.b * k * std::exp(-u / c.a) * std::cos(v / c.a);
}

Field2D apply_sorter_mask1(const Field2D& e, const SorterConfig& c) {
  validate(c);
  return masked(e, 1.0, [&](double x, double y) { return sorter_phase1(x, y, c); });
}

Field2D apply_sorter_mask2(const Field2D& e, const SorterConfig& c) {
  validate(c);
  return masked(e, 1.0, [&](double u, double v) { return sorter_phase2(u, v, c); });
}

Field2D sorter_unwrap(const Field2D& e, const SorterConfig& c) {
  Field2D out = apply_sorter_mask2(fourier_lens(apply_sorter_mask1(e, c), c.f), c);
  out.plane = "unwrapped";
  return out;
}

Field2D sorter_wrap(const Field2D& e, const SorterConfig& c) {
  validate(c);
  const Field2D back = masked(e, -1.0, [&](double u, double v) { return sorter_phase2(u, v, c); });
  Field2D out = masked(inverse_fourier_lens(back, c.f), -1.0,
                       [&](double x, double y) { return sorter_phase1(x, y, c); });
  out.plane = "wrapped";
  return out;
}

}  // namespace hotel::optics
