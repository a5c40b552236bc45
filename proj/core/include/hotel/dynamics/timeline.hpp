#pragma once

// Piecewise description of a time-dependent potential on a well [0, W].

#include <cstddef>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "hotel/well/spectral.hpp"

namespace hotel::dynamics {

/// Constant potential `value` on [lo, hi].
struct UniformOffset {
  double lo = 0.0;
  double hi = 0.0;
  double value = 0.0;
};

/// Rectangular barrier of full height `height` on |x - center| <= half_width.
/// Over its segment the height follows a raised cosine from
/// from_fraction * height to to_fraction * height.
struct Barrier {
  double center = 0.0;
  double half_width = 0.0;
  double height = 0.0;
  double from_fraction = 1.0;
  double to_fraction = 1.0;
  /// Edge smoothing length; 0 gives a sharp edge.
  double edge = 0.0;
};

/// Potential `height` for x beyond a wall whose position moves linearly
/// from `start` to `end` over the segment.
struct MovingWall {
  double start = 0.0;
  double end = 0.0;
  double height = 0.0;
  /// Edge smoothing length; keeps the motion continuous between grid points.
  double edge = 0.0;
};

using PotentialFeature = std::variant<UniformOffset, Barrier, MovingWall>;

struct Segment {
  double duration = 0.0;
  std::vector<PotentialFeature> features;
  std::string label;
};

class PotentialTimeline {
 public:
  PotentialTimeline() = default;
  explicit PotentialTimeline(std::vector<Segment> segments);

  /// DomainError for non-positive durations, a wall moving outward, or
  /// negative heights.
  void add(Segment seg);

  const std::vector<Segment>& segments() const noexcept { return segments_; }
  double duration() const noexcept;
  bool empty() const noexcept { return segments_.empty(); }

  /// Index of the segment containing time t (the last one for t >= duration()).
  std::size_t segment_at(double t) const;
  /// Start time of segment k.
  double segment_start(std::size_t k) const;

  /// Largest potential value any feature reaches.
  double max_potential() const;

  /// Potential of segment k at relative time s in [0, 1] on the points xs.
  void evaluate(std::size_t k, double s, std::span<const double> xs, std::span<double> out) const;
  /// Same at absolute time t.
  void evaluate(double t, std::span<const double> xs, std::span<double> out) const;

 private:
  std::vector<Segment> segments_;
};

/// Raised-cosine interpolation between a and b, s in [0, 1].
double raised_cosine(double a, double b, double s) noexcept;

/// Where a hard wall would have to sit to act like a finite wall of this
/// height and edge on zero-energy states, relative to the wall position.
/// Positive for a sharp step (hbar / sqrt(2 m V)); a soft edge pulls the
/// equivalent wall inward and can make it negative.
double hard_wall_offset(double height, double edge, const well::PhysicalConstants& c = {});

void to_json(nlohmann::json& j, const PotentialTimeline& tl);

}  // namespace hotel::dynamics
