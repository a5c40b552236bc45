#pragma once

// Time stepping of the Schroedinger equation on a Dirichlet grid.
//
// strang-split-sine: half potential kick, exact kinetic step in the sine
//   eigenbasis (an FFT of the odd extension), half potential kick; potential
//   sampled at the step midpoint.
//   Unitary, second order in dt. A potential enters only through
//   exp(-i V dt / hbar), so heights above pi hbar / dt alias; keep
//   V dt / hbar well below pi for barriers and walls.
// crank-nicolson: three-point Laplacian, Cayley step, Thomas solve.
//   Unitary and second order in dt; spatially second order, so high levels
//   carry a dispersion error set by dx.

#include <cstddef>
#include <string>
#include <vector>

#include "hotel/dynamics/grid.hpp"
#include "hotel/dynamics/timeline.hpp"

namespace hotel::dynamics {

enum class Scheme { StrangSine, CrankNicolson };

std::string to_string(Scheme s);
/// Accepts "strang-split-sine" and "crank-nicolson".
Scheme scheme_from_string(const std::string& name);

struct PropagatorSettings {
  double dt = 1e-4;
  Scheme scheme = Scheme::StrangSine;
  /// Heights used when run_dynamic_protocol builds its timeline; 0 picks a default.
  double wall_height = 0.0;
  double barrier_height = 0.0;
  /// Relative norm drift allowed over one advance() call.
  double norm_tolerance = 1e-9;
  well::PhysicalConstants constants{};
};

void validate(const PropagatorSettings& s);

class Propagator {
 public:
  Propagator(double width, std::size_t m, PropagatorSettings settings);

  const PropagatorSettings& settings() const noexcept { return settings_; }
  std::size_t size() const noexcept { return m_; }
  double width() const noexcept { return width_; }
  const std::vector<double>& positions() const noexcept { return xs_; }

  /// Evolve g from t0 to t1 under the timeline. Each overlapped segment piece
  /// is split into ceil(length / dt) equal steps, so segment boundaries are hit
  /// exactly. Segments without features are advanced exactly in one step.
  /// InstabilityError if the norm drifts by more than norm_tolerance.
  void advance(GridState& g, const PotentialTimeline& tl, double t0, double t1);

  /// Total steps taken so far.
  std::size_t steps() const noexcept { return steps_; }

 private:
  void advance_piece(const PotentialTimeline& tl, std::size_t k, double a, double b);
  void kinetic(double h);
  void strang_piece(const PotentialTimeline& tl, std::size_t k, double a, double b);
  void cn_piece(const PotentialTimeline& tl, std::size_t k, double a, double b);
  void cn_step(double h);

  double width_;
  std::size_t m_;
  PropagatorSettings settings_;
  OddExtensionFft fft_;
  std::vector<double> xs_;
  std::vector<double> energies_;
  double kinetic_h_ = -1.0;
  std::vector<cplx> kinetic_factor_;
  std::vector<double> v_, v_prev_;
  std::vector<cplx> half_kick_;
  std::vector<cplx> cn_rhs_, cn_c_, cn_scratch_;
  std::size_t steps_ = 0;
};

/// Convenience wrapper: evolve over the whole timeline.
GridState propagate(const GridState& g, const PotentialTimeline& tl,
                    const PropagatorSettings& settings);

/// Free evolution for time t (a single featureless segment).
GridState propagate_free(const GridState& g, double t, const PropagatorSettings& settings);

}  // namespace hotel::dynamics
