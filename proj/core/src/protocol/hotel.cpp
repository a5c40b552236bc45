#include "hotel/protocol/hotel.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <sstream>

#include "hotel/error.hpp"
#include "hotel/well/trig.hpp"

namespace hotel::protocol {

namespace {

constexpr double kPi = std::numbers::pi;
using Clock = std::chrono::steady_clock;
using well::Amplitudes;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::size_t highest_occupied(const SpectralState& s) {
  for (Eigen::Index k = s.amps.size(); k > 0; --k) {
    if (s.amps[k - 1] != cplx{0.0, 0.0}) return static_cast<std::size_t>(k);
  }
  return 0;
}

double wrap_2pi(double a) {
  double r = std::fmod(a, 2.0 * kPi);
  if (r < 0.0) r += 2.0 * kPi;
  return r;
}

// alpha_n * (-1)^(n s): sub-well s of the target hotel_multiply_oracle state.
Amplitudes alternating(const Amplitudes& a, std::size_t s) {
  Amplitudes out = a;
  if (s % 2 == 1) {
    for (Eigen::Index k = 0; k < out.size(); k += 2) out[k] = -out[k];
  }
  return out;
}

// Multiply every amplitude by exp(-i pi q_n) with q_n = n^2 * w, reduced
// exactly as in free_evolve.
void apply_quadratic_phase(Amplitudes& a, double w) {
  const double frac = w - 2.0 * std::floor(w / 2.0);
  for (Eigen::Index k = 0; k < a.size(); ++k) {
    const double n = static_cast<double>(k + 1);
    const double q = std::fmod(n * n * frac, 2.0);
    a[k] *= cplx(cospi(q), -sinpi(q));
  }
}

}  // namespace

// ---------------------------------------------------------------------------

SpectralState hotel_shift(const SpectralState& s, std::size_t k,
                          std::optional<std::size_t> capacity) {
  std::size_t modes = s.modes() + k;
  if (capacity) {
    const std::size_t top = highest_occupied(s);
    if (top + k > *capacity) {
      std::ostringstream msg;
      msg << "hotel_shift: level " << top + k << " exceeds capacity " << *capacity;
      throw CapacityError(msg.str());
    }
    modes = std::min(modes, *capacity);
  }
  Amplitudes out = Amplitudes::Zero(static_cast<Eigen::Index>(modes));
  const Eigen::Index keep = std::min<Eigen::Index>(s.amps.size(),
                                                   static_cast<Eigen::Index>(modes - k));
  out.segment(static_cast<Eigen::Index>(k), keep) = s.amps.head(keep);
  return {s.geometry, std::move(out)};
}

SpectralState hotel_multiply_oracle(const SpectralState& s, std::size_t p,
                                    std::optional<std::size_t> capacity) {
  if (p == 0) throw DomainError("hotel_multiply_oracle: p must be positive");
  std::size_t modes = p * s.modes();
  if (capacity) {
    const std::size_t top = highest_occupied(s);
    if (p * top > *capacity) {
      std::ostringstream msg;
      msg << "hotel_multiply_oracle: level " << p * top << " exceeds capacity " << *capacity;
      throw CapacityError(msg.str());
    }
    modes = std::min(modes, *capacity);
  }
  Amplitudes out = Amplitudes::Zero(static_cast<Eigen::Index>(modes));
  for (std::size_t n = 1; n <= s.modes() && p * n <= modes; ++n) {
    out[static_cast<Eigen::Index>(p * n - 1)] = s.amps[static_cast<Eigen::Index>(n - 1)];
  }
  return {s.geometry, std::move(out)};
}

SpectralState hotel_multiply_adjoint(const SpectralState& s, std::size_t p) {
  if (p == 0) throw DomainError("hotel_multiply_adjoint: p must be positive");
  const std::size_t modes = std::max<std::size_t>(1, s.modes() / p);
  Amplitudes out = Amplitudes::Zero(static_cast<Eigen::Index>(modes));
  for (std::size_t n = 1; n <= modes && p * n <= s.modes(); ++n) {
    out[static_cast<Eigen::Index>(n - 1)] = s.amps[static_cast<Eigen::Index>(p * n - 1)];
  }
  return {s.geometry, std::move(out)};
}

double vacancy_leakage(const SpectralState& s, std::size_t p) {
  if (p == 0) throw DomainError("vacancy_leakage: p must be positive");
  double acc = 0.0;
  for (std::size_t n = 1; n <= s.modes(); ++n) {
    if (n % p != 0) acc += std::norm(s.amps[static_cast<Eigen::Index>(n - 1)]);
  }
  return acc;
}

SpectralState fix_global_phase(const SpectralState& s, double occupied_threshold) {
  const double peak = s.amps.cwiseAbs().maxCoeff();
  if (peak == 0.0) return s;
  for (Eigen::Index k = 0; k < s.amps.size(); ++k) {
    const double mag = std::abs(s.amps[k]);
    if (mag > occupied_threshold * peak) return scaled(s, std::conj(s.amps[k]) / mag);
  }
  return s;
}

// ---------------------------------------------------------------------------

SplitResult split_into(const SpectralState& s, std::size_t parts, std::size_t modes,
                       double node_tol) {
  if (parts < 2) throw DomainError("split_into: need at least two parts");
  if (modes == 0) throw DomainError("split_into: need at least one mode per piece");
  const double w = s.geometry.width / static_cast<double>(parts);

  SplitResult out;
  double peak = 0.0;
  for (std::size_t k = 0; k < parts; ++k) {
    const WellGeometry sub{w, s.geometry.origin + static_cast<double>(k) * w};
    out.pieces.push_back(well::restrict_to(s, sub, modes));
    peak = std::max(peak, well::peak_magnitude(out.pieces.back()));
  }
  for (std::size_t k = 1; k < parts; ++k) {
    const double x = s.geometry.origin + static_cast<double>(k) * w;
    const double rel = peak > 0.0 ? std::abs(well::evaluate_extrapolated(s, x)) / peak : 0.0;
    out.node_values.push_back(rel);
    if (rel > node_tol) {
      std::ostringstream msg;
      msg << "no node at x = " << x << ": |psi| is " << rel << " of peak (tolerance " << node_tol
          << ")";
      throw NodeError(msg.str(), x, rel);
    }
  }
  return out;
}

std::pair<SpectralState, SpectralState> split_at_node(const SpectralState& s, std::size_t modes,
                                                      double node_tol) {
  auto r = split_into(s, 2, modes, node_tol);
  return {std::move(r.pieces[0]), std::move(r.pieces[1])};
}

SpectralState phase_offset(const SpectralState& piece, double potential, double t,
                           const PhysicalConstants& c) {
  SpectralState out = well::free_evolve(piece, t, c);
  // potential * t / hbar can be large; reduce in units of pi like the kinetic phases
  const double q = potential * t / (c.hbar * kPi);
  const double r = reduce_pi_units(q);
  out.amps *= cplx(cospi(r), -sinpi(r));
  return out;
}

SpectralState merge_pieces(std::span<const SpectralState> pieces, std::size_t modes) {
  if (pieces.empty()) throw DomainError("merge_pieces: nothing to merge");
  const WellGeometry& first = pieces.front().geometry;
  const double w = first.width;
  for (std::size_t k = 1; k < pieces.size(); ++k) {
    const WellGeometry expect{w, first.origin + static_cast<double>(k) * w};
    const WellGeometry& got = pieces[k].geometry;
    if (std::abs(got.width - expect.width) > 1e-12 * w ||
        std::abs(got.origin - expect.origin) > 1e-12 * w) {
      throw GeometryMismatch("merge_pieces: pieces must be adjacent wells of equal width");
    }
  }
  if (modes == 0) modes = pieces.size() * pieces.front().modes();
  const WellGeometry big{w * static_cast<double>(pieces.size()), first.origin};
  Amplitudes acc = Amplitudes::Zero(static_cast<Eigen::Index>(modes));
  for (const auto& piece : pieces) {
    acc += well::apply_real(well::projection_matrix(piece.geometry, piece.modes(), big, modes),
                            piece.amps);
  }
  return {big, std::move(acc)};
}

SpectralState merge_halves(const SpectralState& left, const SpectralState& right,
                           std::size_t modes) {
  const SpectralState both[] = {left, right};
  return merge_pieces(both, modes);
}

double compression_phase_integral(double start_width, double end_width, double duration) {
  if (!(start_width > 0.0) || !(end_width > 0.0) || duration < 0.0) {
    throw DomainError("compression_phase_integral: widths must be positive, duration >= 0");
  }
  // integral of dt / (w0 + (w1 - w0) t / T)^2 over [0, T]
  return duration / (start_width * end_width);
}

RetagResult adiabatic_retag(const SpectralState& s, double target_width, double compression_time,
                            bool correct_phases, const PhysicalConstants& c) {
  well::validate(c);
  const WellGeometry target{target_width, s.geometry.origin};
  well::validate(target);
  // phase_n = -pi * n^2 * w
  const double w = c.hbar * kPi *
                   compression_phase_integral(s.geometry.width, target_width, compression_time) /
                   (2.0 * c.mass);
  RetagResult out{SpectralState(target, s.amps), {}};
  out.dynamical_phases.resize(s.modes());
  for (std::size_t k = 0; k < s.modes(); ++k) {
    const double n = static_cast<double>(k + 1);
    out.dynamical_phases[k] = -kPi * n * n * w;
  }
  if (!correct_phases) apply_quadratic_phase(out.state.amps, w);
  return out;
}

// ---------------------------------------------------------------------------

CopyPattern derive_copy_pattern(std::size_t p, double small_width, const PhysicalConstants& c,
                                double residual_tol) {
  if (p < 2) throw DomainError("derive_copy_pattern: p must be at least 2");
  well::validate(c);
  const WellGeometry small{small_width, 0.0};
  well::validate(small);
  const WellGeometry big{small_width * static_cast<double>(p), 0.0};

  // Generic probe: needs both parities so direct and mirrored copies differ.
  constexpr std::size_t kProbeModes = 48;
  Amplitudes probe = Amplitudes::Zero(kProbeModes);
  probe[0] = {1.0, 0.0};
  probe[1] = {0.7, 0.3};
  probe[2] = {-0.4, 0.5};
  probe[3] = {0.0, 0.2};
  probe /= probe.norm();
  const SpectralState probe_state(small, probe);
  const std::size_t work = 4096 * p;
  const SpectralState expanded = well::rebase(probe_state, big, work);

  std::vector<Eigen::MatrixXd> restrict;
  for (std::size_t s = 0; s < p; ++s) {
    const WellGeometry sub{small_width, static_cast<double>(s) * small_width};
    restrict.push_back(well::projection_matrix(big, work, sub, kProbeModes));
  }

  const double tau = well::revival_time(small_width, c);
  double best_residual = std::numeric_limits<double>::infinity();
  for (std::size_t r = 1; r < 2 * p; ++r) {
    const double t = static_cast<double>(r * p) * tau / 2.0;
    const SpectralState evolved = well::free_evolve(expanded, t, c);
    CopyPattern pat;
    pat.p = p;
    pat.split_time = t;
    pat.split_time_revivals = static_cast<double>(r * p) / 2.0;
    double worst = 0.0;
    for (std::size_t s = 0; s < p; ++s) {
      const Amplitudes piece = well::apply_real(restrict[s], evolved.amps);
      const Amplitudes target = alternating(probe, s);
      const cplx coeff = target.dot(piece);
      const double residual = (piece - coeff * target).norm();
      const double weight_error = std::abs(std::norm(coeff) - 1.0 / static_cast<double>(p));
      worst = std::max({worst, residual, weight_error});
      pat.orientation.push_back(s % 2 == 0 ? 1 : -1);
      pat.copy_phases.push_back(std::arg(coeff));
    }
    best_residual = std::min(best_residual, worst);
    if (worst >= residual_tol) continue;

    pat.residual = worst;
    pat.phase_step_time = tau;
    for (std::size_t s = 0; s < p; ++s) {
      const double delta = wrap_2pi(pat.copy_phases[s] - pat.copy_phases[0]);
      pat.offsets.push_back(delta);
      pat.potentials.push_back(c.hbar * delta / tau);
    }
    return pat;
  }
  std::ostringstream msg;
  msg << "no fractional revival with " << p << " equal copies found (best residual "
      << best_residual << ")";
  throw Error(msg.str());
}

// ---------------------------------------------------------------------------

std::size_t ProtocolConfig::resolved_work_modes() const {
  if (work_modes != 0) return work_modes;
  return p * std::max<std::size_t>(8192, 64 * N);
}

void validate(const ProtocolConfig& cfg) {
  if (cfg.p < 2) throw DomainError("protocol: p must be at least 2");
  if (cfg.N < 1) throw DomainError("protocol: N must be at least 1");
  if (!(cfg.L > 0.0) || !std::isfinite(cfg.L)) throw DomainError("protocol: L must be positive");
  if (!(cfg.node_tol > 0.0)) throw DomainError("protocol: node_tol must be positive");
  if (!(cfg.truncation_tol >= 0.0)) throw DomainError("protocol: truncation_tol must be >= 0");
  if (cfg.compression_time < 0.0) throw DomainError("protocol: compression_time must be >= 0");
  well::validate(cfg.constants);
  if (cfg.resolved_work_modes() < cfg.p * cfg.N) {
    throw CapacityError("protocol: work_modes must be at least p * N");
  }
}

ProtocolPlan::ProtocolPlan(ProtocolConfig cfg) : cfg_(cfg) {
  validate(cfg_);
  pattern_ = derive_copy_pattern(cfg_.p, cfg_.L, cfg_.constants);
  small_ = {cfg_.L, 0.0};
  big_ = {cfg_.L * static_cast<double>(cfg_.p), 0.0};
  const std::size_t work = cfg_.resolved_work_modes();
  expand_ = well::projection_matrix(small_, cfg_.N, big_, work);
  for (std::size_t s = 0; s < cfg_.p; ++s) {
    const WellGeometry sub{cfg_.L, static_cast<double>(s) * cfg_.L};
    subwells_.push_back(sub);
    // the leftmost sub-well coincides with the input well
    restrict_.push_back(s == 0 ? Eigen::MatrixXd(expand_.transpose())
                               : well::projection_matrix(big_, work, sub, cfg_.N));
    merge_.push_back(well::projection_matrix(sub, cfg_.N, big_, cfg_.p * cfg_.N));
  }
}

ProtocolResult ProtocolPlan::run(const SpectralState& input) const {
  if (!(input.geometry == small_)) {
    throw GeometryMismatch("protocol input must live in the width-L well at origin 0");
  }
  if (input.modes() > cfg_.N) {
    throw CapacityError("protocol input has more modes than N");
  }
  Amplitudes a = Amplitudes::Zero(static_cast<Eigen::Index>(cfg_.N));
  a.head(input.amps.size()) = input.amps;
  const double in_norm = a.squaredNorm();

  ProtocolResult res;
  ProtocolTrace& trace = res.trace;
  trace.pattern = pattern_;
  auto record = [&](const char* label, std::vector<SpectralState> snap, Clock::time_point t0) {
    double n = 0.0;
    for (const auto& st : snap) n += st.norm_squared();
    trace.steps.push_back({label, std::move(snap), n, seconds_since(t0)});
  };

  // i) expand
  auto t0 = Clock::now();
  SpectralState expanded(big_, well::apply_real(expand_, a));
  trace.norm_captured = in_norm > 0.0 ? expanded.norm_squared() / in_norm : 1.0;
  if (1.0 - trace.norm_captured > cfg_.truncation_tol) {
    std::ostringstream msg;
    msg << "truncation: expanded basis captures " << trace.norm_captured << " of the input norm";
    trace.flags.push_back(msg.str());
  }
  record("expand", {expanded}, t0);

  // ii) evolve to the fractional revival
  t0 = Clock::now();
  SpectralState evolved = well::free_evolve(expanded, pattern_.split_time, cfg_.constants);
  record("mirror-evolve", {evolved}, t0);

  // iii) split at the nodes
  t0 = Clock::now();
  std::vector<SpectralState> pieces;
  double peak = 0.0;
  for (std::size_t s = 0; s < cfg_.p; ++s) {
    pieces.emplace_back(subwells_[s], well::apply_real(restrict_[s], evolved.amps));
    peak = std::max(peak, well::peak_magnitude(pieces.back()));
  }
  for (std::size_t s = 1; s < cfg_.p; ++s) {
    const double x = static_cast<double>(s) * cfg_.L;
    const double rel =
        peak > 0.0 ? std::abs(well::evaluate_extrapolated(evolved, x)) / peak : 0.0;
    trace.node_values.push_back(rel);
    if (rel > cfg_.node_tol) {
      std::ostringstream msg;
      msg << "no node at x = " << x << ": |psi| is " << rel << " of peak (tolerance "
          << cfg_.node_tol << ")";
      throw NodeError(msg.str(), x, rel);
    }
  }
  record("split", pieces, t0);

  // iv) per-sub-well potentials
  t0 = Clock::now();
  for (std::size_t s = 0; s < cfg_.p; ++s) {
    pieces[s] = phase_offset(pieces[s], pattern_.potentials[s], pattern_.phase_step_time,
                             cfg_.constants);
  }
  record("phase", pieces, t0);

  // v) remove the barriers
  t0 = Clock::now();
  Amplitudes merged = Amplitudes::Zero(static_cast<Eigen::Index>(cfg_.p * cfg_.N));
  for (std::size_t s = 0; s < cfg_.p; ++s) merged += well::apply_real(merge_[s], pieces[s].amps);
  SpectralState merged_state(big_, std::move(merged));
  record("merge", {merged_state}, t0);

  // vi) compress back to width L
  t0 = Clock::now();
  RetagResult retag = adiabatic_retag(merged_state, cfg_.L, cfg_.compression_time,
                                      cfg_.correct_global_phase, cfg_.constants);
  res.output = cfg_.correct_global_phase ? fix_global_phase(retag.state) : retag.state;
  record("compress", {res.output}, t0);
  return res;
}

ProtocolResult run_ideal_protocol(const SpectralState& s, const ProtocolConfig& cfg) {
  if (cfg.p != 2) throw DomainError("run_ideal_protocol handles p = 2; use run_ideal_protocol_p");
  return ProtocolPlan(cfg).run(s);
}

ProtocolResult run_ideal_protocol_p(const SpectralState& s, const ProtocolConfig& cfg) {
  return ProtocolPlan(cfg).run(s);
}

// ---------------------------------------------------------------------------

namespace {

nlohmann::json amps_json(const SpectralState& s, std::size_t max_modes) {
  nlohmann::json arr = nlohmann::json::array();
  const std::size_t n = std::min(max_modes, s.modes());
  for (std::size_t k = 0; k < n; ++k) {
    const cplx a = s.amps[static_cast<Eigen::Index>(k)];
    arr.push_back({a.real(), a.imag()});
  }
  return arr;
}

}  // namespace

void to_json(nlohmann::json& j, const CopyPattern& pat) {
  j = {{"p", pat.p},
       {"split_time", pat.split_time},
       {"split_time_revivals", pat.split_time_revivals},
       {"orientation", pat.orientation},
       {"copy_phases", pat.copy_phases},
       {"offsets", pat.offsets},
       {"potentials", pat.potentials},
       {"phase_step_time", pat.phase_step_time},
       {"residual", pat.residual}};
}

nlohmann::json ProtocolTrace::to_json(std::size_t max_modes, bool with_timing) const {
  nlohmann::json steps_json = nlohmann::json::array();
  for (const auto& e : steps) {
    nlohmann::json snap = nlohmann::json::array();
    for (const auto& st : e.snapshot) {
      snap.push_back({{"geometry", {{"width", st.geometry.width}, {"origin", st.geometry.origin}}},
                      {"modes", st.modes()},
                      {"amps", amps_json(st, max_modes)}});
    }
    nlohmann::json step = {{"label", e.label}, {"norm", e.norm}, {"snapshot", snap}};
    if (with_timing) step["seconds"] = e.seconds;
    steps_json.push_back(std::move(step));
  }
  return {{"steps", steps_json},
          {"pattern", pattern},
          {"node_values", node_values},
          {"norm_captured", norm_captured},
          {"flags", flags}};
}

}  // namespace hotel::protocol
