#pragma once

// Ideal Hilbert Hotel pipeline in the exact eigenbasis, plus the closed-form
// level-mapping operators it is checked against.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "hotel/well/spectral.hpp"

namespace hotel::protocol {

using well::cplx;
using well::PhysicalConstants;
using well::SpectralState;
using well::WellGeometry;

// ---------------------------------------------------------------------------
// Reference operators

/// alpha_n moves to level n + k. The truncation grows by k unless that
/// exceeds `capacity`, in which case CapacityError is thrown.
SpectralState hotel_shift(const SpectralState& s, std::size_t k,
                          std::optional<std::size_t> capacity = std::nullopt);

/// alpha_n moves to level p n; levels that are not multiples of p are vacant.
/// Output truncation is p * N.
SpectralState hotel_multiply_oracle(const SpectralState& s, std::size_t p,
                                    std::optional<std::size_t> capacity = std::nullopt);

/// Adjoint of the multiplication oracle: beta_n = alpha_{p n}.
SpectralState hotel_multiply_adjoint(const SpectralState& s, std::size_t p);

/// Power carried by levels that are not multiples of p.
double vacancy_leakage(const SpectralState& s, std::size_t p);

/// Rotate the global phase so the lowest occupied level is real and >= 0.
SpectralState fix_global_phase(const SpectralState& s, double occupied_threshold = 1e-6);

// ---------------------------------------------------------------------------
// Pipeline building blocks

struct SplitResult {
  std::vector<SpectralState> pieces;
  /// |psi(node)| / peak |psi| at each interior split point, left to right.
  std::vector<double> node_values;
};

/// Cut a well into `parts` equal sub-wells at its interior nodes and
/// re-project each piece onto its own eigenbasis with `modes` levels.
/// NodeError if |psi| at a cut exceeds node_tol times the peak magnitude.
SplitResult split_into(const SpectralState& s, std::size_t parts, std::size_t modes,
                       double node_tol = 1e-8);

/// Two-way split at the centre.
std::pair<SpectralState, SpectralState> split_at_node(const SpectralState& s, std::size_t modes,
                                                      double node_tol = 1e-8);

/// Evolve a sub-well for time t under its free Hamiltonian plus a constant
/// potential V: every amplitude picks up exp(-i V t / hbar) on top of the
/// free phases.
SpectralState phase_offset(const SpectralState& piece, double potential, double t,
                           const PhysicalConstants& c = {});

/// Re-project adjacent equal-width pieces onto the eigenbasis of their union.
/// `modes` = 0 picks pieces.size() * piece modes.
SpectralState merge_pieces(std::span<const SpectralState> pieces, std::size_t modes = 0);
SpectralState merge_halves(const SpectralState& left, const SpectralState& right,
                           std::size_t modes = 0);

/// Integral of dt / w(t)^2 for a wall moving linearly from `start_width` to
/// `end_width` over `duration`.
double compression_phase_integral(double start_width, double end_width, double duration);

struct RetagResult {
  SpectralState state;
  /// Dynamical phase -(1/hbar) * integral E_n(t) dt for each level (n = index + 1).
  std::vector<double> dynamical_phases;
};

/// Ideal adiabatic compression: amplitude on g_n is carried to h_n of the
/// narrower well. With `correct_phases` the dynamical phases are reported but
/// not applied; otherwise they are applied for a linear wall motion lasting
/// `compression_time`.
RetagResult adiabatic_retag(const SpectralState& s, double target_width, double compression_time,
                            bool correct_phases, const PhysicalConstants& c = {});

// ---------------------------------------------------------------------------
// Fractional revival copy pattern

struct CopyPattern {
  std::size_t p = 2;
  /// Free evolution time in the width-pL well before the split.
  double split_time = 0.0;
  /// split_time in units of the small-well revival period.
  double split_time_revivals = 0.0;
  /// +1 when sub-well s holds a direct copy, -1 for a mirrored one.
  std::vector<int> orientation;
  /// arg of each copy's amplitude relative to the target (-1)^(n s) alpha_n.
  std::vector<double> copy_phases;
  /// Phase removed from each sub-well, relative to sub-well 0, in [0, 2 pi).
  std::vector<double> offsets;
  /// Constant potential applied to each sub-well for phase_step_time.
  std::vector<double> potentials;
  double phase_step_time = 0.0;
  /// Worst deviation of any sub-well from its fitted copy.
  double residual = 0.0;
};

/// Search the fractional revival times r * p * tau / 2 (tau = small-well
/// revival period) for the first one at which every sub-well holds an equal
/// weight copy with the alternating direct/mirror layout, and fit per
/// sub-well phases. Throws Error if no candidate passes `residual_tol`.
CopyPattern derive_copy_pattern(std::size_t p, double small_width,
                                const PhysicalConstants& c = {}, double residual_tol = 1e-8);

// ---------------------------------------------------------------------------
// Full ideal pipeline

struct ProtocolConfig {
  std::size_t p = 2;
  double L = 1.0;
  /// Mode truncation of the input, of each sub-well, and (times p) of the output.
  std::size_t N = 64;
  bool correct_global_phase = true;
  /// Truncation of the expanded-well basis; 0 picks p * max(8192, 64 N).
  std::size_t work_modes = 0;
  double node_tol = 1e-8;
  /// Expansion norm loss above this is flagged in the trace.
  double truncation_tol = 1e-8;
  /// Only used when correct_global_phase is false.
  double compression_time = 0.0;
  PhysicalConstants constants{};

  std::size_t resolved_work_modes() const;
};

void validate(const ProtocolConfig& cfg);

struct TraceEntry {
  std::string label;  // expand, mirror-evolve, split, phase, merge, compress
  std::vector<SpectralState> snapshot;
  double norm = 0.0;
  double seconds = 0.0;
};

struct ProtocolTrace {
  std::vector<TraceEntry> steps;
  CopyPattern pattern;
  std::vector<double> node_values;
  /// Expanded-basis norm captured from the input.
  double norm_captured = 1.0;
  std::vector<std::string> flags;

  /// Amplitude lists are cut at `max_modes` per snapshot; wall-clock
  /// seconds are included only when `with_timing` is set.
  nlohmann::json to_json(std::size_t max_modes = 64, bool with_timing = true) const;
};

struct ProtocolResult {
  SpectralState output;
  ProtocolTrace trace;
};

/// Precomputed projection matrices for one configuration; reuse it to push
/// many states through the same pipeline.
class ProtocolPlan {
 public:
  explicit ProtocolPlan(ProtocolConfig cfg);

  const ProtocolConfig& config() const noexcept { return cfg_; }
  const CopyPattern& pattern() const noexcept { return pattern_; }

  ProtocolResult run(const SpectralState& s) const;

 private:
  ProtocolConfig cfg_;
  CopyPattern pattern_;
  WellGeometry small_;
  WellGeometry big_;
  std::vector<WellGeometry> subwells_;
  Eigen::MatrixXd expand_;               // work x N
  std::vector<Eigen::MatrixXd> restrict_;  // N x work, one per sub-well
  std::vector<Eigen::MatrixXd> merge_;     // pN x N, one per sub-well
};

/// p = 2 pipeline; throws DomainError for other p.
ProtocolResult run_ideal_protocol(const SpectralState& s, const ProtocolConfig& cfg);
/// General p >= 2.
ProtocolResult run_ideal_protocol_p(const SpectralState& s, const ProtocolConfig& cfg);

void to_json(nlohmann::json& j, const CopyPattern& pattern);

}  // namespace hotel::protocol
