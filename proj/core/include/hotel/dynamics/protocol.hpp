#pragma once

// The Hilbert Hotel protocol with realistic features: finite barriers ramped
// in and out, real potential offsets, and a wall compressing the well at
// finite speed, all integrated on a grid.

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "hotel/dynamics/grid.hpp"
#include "hotel/dynamics/propagate.hpp"
#include "hotel/dynamics/timeline.hpp"
#include "hotel/protocol/hotel.hpp"

namespace hotel::dynamics {

/// Zero means "use the default" for every field except M and scheme.
struct DynamicKnobs {
  double barrier_ramp_time = 0.0;
  double barrier_height = 0.0;
  double barrier_half_width = 0.0;
  double compression_time = 0.0;
  double wall_height = 0.0;
  double wall_edge = 0.0;
  double dt = 0.0;
  std::size_t M = 2047;
  Scheme scheme = Scheme::StrangSine;
};

/// Knobs with every default filled in, for one protocol configuration and
/// the highest occupied input level.
struct ResolvedKnobs {
  double barrier_ramp_time;
  double barrier_height;
  double barrier_half_width;
  double compression_time;
  double wall_height;
  double wall_edge;
  double dt;
  std::size_t M;
  Scheme scheme;
  /// hbar omega0(L) (p n_max)^2, the top output level energy.
  double e_max;
};

ResolvedKnobs resolve(const DynamicKnobs& knobs, const protocol::ProtocolConfig& cfg,
                      std::size_t n_max);

/// Segments: free evolution, barrier ramp up (offsets join halfway), full
/// barrier with offsets, ramp down (offsets leave halfway), wall compression.
/// The offsets act for exactly one small-well revival period and the ramps
/// are centred on the ideal split and merge instants. The wall is placed so
/// that its hard-wall equivalent (see hard_wall_offset) moves from W to L.
PotentialTimeline build_protocol_timeline(const protocol::ProtocolConfig& cfg,
                                          const protocol::CopyPattern& pattern,
                                          const ResolvedKnobs& knobs);

struct FidelityReport {
  /// |<oracle|out>|^2 after removing the ideal adiabatic dynamical phases.
  double fidelity = 0.0;
  /// |<oracle|out>|^2 with no phase correction.
  double fidelity_raw = 0.0;
  /// Best fidelity over an extra phase b n^2, which a change of the total
  /// evolution time supplies; absorbs finite-wall energy shifts.
  double fidelity_fit = 0.0;
  double fit_quadratic_phase = 0.0;
  /// Output power on levels not divisible by p, relative to the output norm.
  double vacancy_leakage = 0.0;
  /// Probability left beyond x = L after compression.
  double wall_leakage = 0.0;
  /// Norm of the final state in the width-L basis.
  double output_norm = 0.0;
  /// Largest relative norm change of the grid state across the run.
  double norm_drift = 0.0;
  std::size_t dominant_level = 0;
  std::size_t steps = 0;
  /// Grid norm at the end of each timeline segment.
  std::vector<std::pair<std::string, double>> step_norms;
  std::vector<std::string> warnings;
};

struct DynamicResult {
  well::SpectralState output;  // width-L basis, p * N modes
  FidelityReport report;
  ResolvedKnobs knobs;
  PotentialTimeline timeline;
};

DynamicResult run_dynamic_protocol(const well::SpectralState& s,
                                   const protocol::ProtocolConfig& cfg,
                                   const DynamicKnobs& knobs);

void to_json(nlohmann::json& j, const FidelityReport& r);
void to_json(nlohmann::json& j, const ResolvedKnobs& k);

}  // namespace hotel::dynamics
