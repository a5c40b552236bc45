#pragma once

// Space-time density |psi(x, t)|^2 on a regular grid, for plotting.

#include <cstddef>
#include <vector>

#include "hotel/dynamics/propagate.hpp"

namespace hotel::dynamics {

struct Carpet {
  std::vector<double> times;
  std::vector<double> xs;
  std::vector<double> density;  // row-major [time][x]

  std::size_t rows() const noexcept { return times.size(); }
  std::size_t cols() const noexcept { return xs.size(); }
  double at(std::size_t t, std::size_t x) const { return density[t * xs.size() + x]; }
};

/// Samples the density at `time_samples` equally spaced times over [0, t_end]
/// and `x_samples` equally spaced points over [0, width], walls included.
/// Between grid points the density is interpolated linearly. Past the end of
/// the timeline the state evolves freely. DomainError for fewer than 2
/// samples on either axis.
Carpet carpet(const GridState& g, const PotentialTimeline& tl, double t_end,
              std::size_t time_samples, std::size_t x_samples,
              const PropagatorSettings& settings);

}  // namespace hotel::dynamics
