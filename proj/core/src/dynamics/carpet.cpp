#include "hotel/dynamics/carpet.hpp"

#include <algorithm>
#include <cmath>

#include "hotel/error.hpp"

namespace hotel::dynamics {

namespace {

// |psi|^2 at x by linear interpolation, with zeros at both walls.
double density_at(const GridState& g, double x) {
  const double dx = g.dx();
  const double s = x / dx;
  const auto m = static_cast<long>(g.size());
  const long k = std::clamp(static_cast<long>(std::floor(s)), 0L, m);
  const double f = s - static_cast<double>(k);
  auto rho = [&](long i) { return i < 1 || i > m ? 0.0 : std::norm(g.samples[static_cast<std::size_t>(i - 1)]); };
  return (1.0 - f) * rho(k) + f * rho(k + 1);
}

}  // namespace

Carpet carpet(const GridState& g, const PotentialTimeline& tl, double t_end,
              std::size_t time_samples, std::size_t x_samples,
              const PropagatorSettings& settings) {
  if (time_samples < 2 || x_samples < 2) throw DomainError("carpet needs >= 2 samples per axis");
  if (!(t_end > 0.0)) throw DomainError("carpet needs t_end > 0");

  PotentialTimeline full = tl;
  if (t_end > full.duration()) full.add({t_end - full.duration(), {}, "free"});

  Carpet c;
  for (std::size_t k = 0; k < time_samples; ++k) {
    c.times.push_back(t_end * static_cast<double>(k) / static_cast<double>(time_samples - 1));
  }
  for (std::size_t k = 0; k < x_samples; ++k) {
    c.xs.push_back(g.width * static_cast<double>(k) / static_cast<double>(x_samples - 1));
  }
  c.density.reserve(time_samples * x_samples);

  Propagator prop(g.width, g.size(), settings);
  GridState state = g;
  double now = 0.0;
  for (double t : c.times) {
    if (t > now) prop.advance(state, full, now, t);
    now = t;
    for (double x : c.xs) c.density.push_back(density_at(state, x));
  }
  return c;
}

}  // namespace hotel::dynamics
