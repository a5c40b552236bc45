#include "hotel/dynamics/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <boost/math/tools/minima.hpp>

#include "hotel/error.hpp"
#include "hotel/well/trig.hpp"

namespace hotel::dynamics {

namespace {

constexpr double kPi = std::numbers::pi;
// probability beyond x = L that counts as a leaky wall
constexpr double kWallLeakWarn = 1e-3;
using well::Amplitudes;
using well::SpectralState;
using well::WellGeometry;

std::size_t highest_occupied(const SpectralState& s) {
  for (Eigen::Index k = s.amps.size(); k > 0; --k) {
    if (std::abs(s.amps[k - 1]) > 0.0) return static_cast<std::size_t>(k);
  }
  return 1;
}

// Sample the input, zero beyond L, on the grid of the expanded well.
GridState expanded_grid(const SpectralState& s, double W, std::size_t m) {
  std::vector<cplx> v(m, cplx{0.0, 0.0});
  const double dx = W / static_cast<double>(m + 1);
  const double L = s.geometry.width;
  std::vector<double> xs;
  for (std::size_t j = 0; j < m; ++j) {
    const double x = static_cast<double>(j + 1) * dx;
    if (x >= L) break;
    xs.push_back(x);
  }
  const auto vals = well::evaluate(s, xs);
  for (std::size_t j = 0; j < xs.size(); ++j) v[j] = vals[static_cast<Eigen::Index>(j)];
  GridState g(W, std::move(v));
  // The discrete norm of a band-limited state is exact only when L is a grid
  // point; normalize so that fidelities are not biased by the sampling.
  const double n = g.norm_squared();
  if (n > 0.0) {
    const double scale = std::sqrt(s.norm_squared() / n);
    for (auto& z : g.samples) z *= scale;
  }
  return g;
}

cplx weighted_overlap(const Amplitudes& o, const Amplitudes& a, double b) {
  cplx acc{0.0, 0.0};
  for (Eigen::Index k = 0; k < o.size(); ++k) {
    const double n = static_cast<double>(k + 1);
    const double q = reduce_pi_units(b * n * n / kPi);
    acc += std::conj(o[k]) * a[k] * cplx(cospi(q), sinpi(q));
  }
  return acc;
}

}  // namespace

ResolvedKnobs resolve(const DynamicKnobs& k, const protocol::ProtocolConfig& cfg,
                      std::size_t n_max) {
  protocol::validate(cfg);
  const auto& c = cfg.constants;
  const double tau = well::revival_time(cfg.L, c);
  const double W = cfg.L * static_cast<double>(cfg.p);
  if (k.M < 16) throw DomainError("dynamic protocol needs M >= 16");
  for (double v : {k.barrier_ramp_time, k.barrier_height, k.barrier_half_width,
                   k.compression_time, k.wall_height, k.wall_edge, k.dt}) {
    if (v < 0.0 || !std::isfinite(v)) throw DomainError("dynamic knobs must be >= 0");
  }
  ResolvedKnobs r{};
  r.M = k.M;
  r.scheme = k.scheme;
  const double pn = static_cast<double>(cfg.p * n_max);
  r.e_max = c.hbar * well::omega0(cfg.L, c) * pn * pn;
  r.dt = k.dt > 0.0 ? k.dt : tau / 40000.0;
  const double dx = W / static_cast<double>(k.M + 1);

  // Heights are capped by the aliasing limit of the split step: a potential
  // acts through exp(-i V dt / hbar), so only V dt / hbar < pi is resolved.
  // V dt / hbar = 1 keeps the barrier opaque without wrapping the phase.
  const double alias_cap = c.hbar / r.dt;
  r.wall_height = k.wall_height > 0.0 ? k.wall_height : std::min(1e4 * r.e_max, alias_cap);
  r.barrier_height = k.barrier_height > 0.0 ? k.barrier_height : std::min(1e4 * r.e_max, alias_cap);
  r.barrier_half_width = k.barrier_half_width > 0.0 ? k.barrier_half_width : 6.0 * dx;
  r.barrier_ramp_time = k.barrier_ramp_time > 0.0 ? k.barrier_ramp_time : 1e-3 * tau;
  r.compression_time = k.compression_time > 0.0 ? k.compression_time : 160.0 * tau;
  r.wall_edge = k.wall_edge > 0.0 ? k.wall_edge : 10.0 * dx;
  if (r.barrier_ramp_time > tau) {
    throw DomainError("barrier_ramp_time must not exceed the small-well revival period");
  }
  return r;
}

PotentialTimeline build_protocol_timeline(const protocol::ProtocolConfig& cfg,
                                          const protocol::CopyPattern& pattern,
                                          const ResolvedKnobs& k) {
  const double L = cfg.L;
  const std::size_t p = cfg.p;
  const double W = L * static_cast<double>(p);
  const double tr = k.barrier_ramp_time;
  const double half = 0.5 * tr;
  const double phase_time = pattern.phase_step_time;

  auto barriers = [&](double f0, double f1) {
    std::vector<PotentialFeature> out;
    for (std::size_t s = 1; s < p; ++s) {
      out.push_back(Barrier{static_cast<double>(s) * L, k.barrier_half_width, k.barrier_height,
                            f0, f1, 0.0});
    }
    return out;
  };
  auto with_offsets = [&](std::vector<PotentialFeature> f) {
    for (std::size_t s = 0; s < p; ++s) {
      if (pattern.potentials[s] != 0.0) {
        f.push_back(UniformOffset{static_cast<double>(s) * L, static_cast<double>(s + 1) * L,
                                  pattern.potentials[s]});
      }
    }
    return f;
  };

  PotentialTimeline tl;
  const double free_time = pattern.split_time - half;
  if (free_time > 0.0) tl.add({free_time, {}, "mirror-evolve"});
  tl.add({half, barriers(0.0, 0.5), "split"});
  tl.add({half, with_offsets(barriers(0.5, 1.0)), "split"});
  if (phase_time - tr > 0.0) tl.add({phase_time - tr, with_offsets(barriers(1.0, 1.0)), "phase"});
  tl.add({half, with_offsets(barriers(1.0, 0.5)), "merge"});
  tl.add({half, barriers(0.5, 0.0), "merge"});
  // A finite wall confines like a hard wall displaced by `shift`; place it so
  // that the equivalent hard wall runs from W to L.
  const double shift = hard_wall_offset(k.wall_height, k.wall_edge, cfg.constants);
  tl.add({k.compression_time,
          {MovingWall{W - shift, L - shift, k.wall_height, k.wall_edge}},
          "compress"});
  return tl;
}

DynamicResult run_dynamic_protocol(const SpectralState& s, const protocol::ProtocolConfig& cfg,
                                   const DynamicKnobs& knobs) {
  const WellGeometry small{cfg.L, 0.0};
  if (!(s.geometry == small)) {
    throw GeometryMismatch("dynamic protocol input must live in the width-L well at origin 0");
  }
  if (s.modes() > cfg.N) throw CapacityError("dynamic protocol input has more modes than N");
  const std::size_t n_max = highest_occupied(s);

  DynamicResult res;
  res.knobs = resolve(knobs, cfg, n_max);
  const auto& k = res.knobs;
  const auto pattern = protocol::derive_copy_pattern(cfg.p, cfg.L, cfg.constants);
  res.timeline = build_protocol_timeline(cfg, pattern, k);

  const double W = cfg.L * static_cast<double>(cfg.p);
  PropagatorSettings ps;
  ps.dt = k.dt;
  ps.scheme = k.scheme;
  ps.wall_height = k.wall_height;
  ps.barrier_height = k.barrier_height;
  ps.constants = cfg.constants;
  // checked once over the whole run below
  ps.norm_tolerance = 1.0;
  Propagator prop(W, k.M, ps);

  GridState g = expanded_grid(s, W, k.M);
  const double n0 = g.norm_squared();
  auto& rep = res.report;
  double t = 0.0;
  for (const auto& seg : res.timeline.segments()) {
    prop.advance(g, res.timeline, t, t + seg.duration);
    t += seg.duration;
    const double n = g.norm_squared();
    rep.step_norms.emplace_back(seg.label, n);
    rep.norm_drift = std::max(rep.norm_drift, std::abs(n - n0) / n0);
  }
  rep.steps = prop.steps();
  // rounding drift is linear in the step count; an instability grows geometrically
  const double drift_limit =
      std::max(1e-9, 16.0 * std::numeric_limits<double>::epsilon() * static_cast<double>(rep.steps));
  if (rep.norm_drift > drift_limit) {
    std::ostringstream msg;
    msg << "grid norm drifted by " << rep.norm_drift << "; try a smaller dt";
    throw InstabilityError(msg.str(), rep.norm_drift);
  }

  const double dx = g.dx();
  for (std::size_t j = 0; j < g.size(); ++j) {
    if (g.x(j) > cfg.L) rep.wall_leakage += std::norm(g.samples[j]) * dx;
  }

  const std::size_t out_modes = cfg.p * cfg.N;
  const SpectralState wide = to_spectral(g, k.M);
  res.output = well::restrict_to(wide, small, out_modes);
  rep.output_norm = res.output.norm_squared();
  rep.vacancy_leakage = protocol::vacancy_leakage(res.output, cfg.p) / rep.output_norm;
  Eigen::Index top = 0;
  res.output.amps.cwiseAbs2().maxCoeff(&top);
  rep.dominant_level = static_cast<std::size_t>(top) + 1;

  SpectralState padded(small, Amplitudes::Zero(static_cast<Eigen::Index>(cfg.N)));
  padded.amps.head(s.amps.size()) = s.amps;
  const Amplitudes oracle = protocol::hotel_multiply_oracle(padded, cfg.p).amps;
  rep.fidelity_raw = std::norm(oracle.dot(res.output.amps));

  // undo -pi n^2 w, the phase the ideal adiabatic map accumulates
  const double w = cfg.constants.hbar * kPi *
                   protocol::compression_phase_integral(W, cfg.L, k.compression_time) /
                   (2.0 * cfg.constants.mass);
  Amplitudes corrected = res.output.amps;
  for (Eigen::Index i = 0; i < corrected.size(); ++i) {
    const double n = static_cast<double>(i + 1);
    const double q = std::fmod(n * n * (w - 2.0 * std::floor(w / 2.0)), 2.0);
    corrected[i] *= cplx(cospi(q), sinpi(q));
  }
  rep.fidelity = std::norm(oracle.dot(corrected));

  // one-parameter search over b in [-pi, pi): coarse scan, then Brent
  constexpr int kScan = 720;
  double best_b = 0.0;
  double best = -1.0;
  for (int i = 0; i < kScan; ++i) {
    const double b = -kPi + 2.0 * kPi * i / kScan;
    const double f = std::norm(weighted_overlap(oracle, corrected, b));
    if (f > best) {
      best = f;
      best_b = b;
    }
  }
  const double span = 2.0 * kPi / kScan;
  const auto refined = boost::math::tools::brent_find_minima(
      [&](double b) { return -std::norm(weighted_overlap(oracle, corrected, b)); },
      best_b - span, best_b + span, 40);
  rep.fit_quadratic_phase = refined.first;
  rep.fidelity_fit = std::max(best, -refined.second);

  if (rep.wall_leakage > kWallLeakWarn) {
    std::ostringstream msg;
    msg << "wall_height too low: " << rep.wall_leakage << " of the probability is beyond x = L";
    rep.warnings.push_back(msg.str());
  }
  const double hbar = cfg.constants.hbar;
  if (k.scheme == Scheme::StrangSine &&
      std::max(k.wall_height, k.barrier_height) * k.dt / hbar > 0.5 * kPi) {
    rep.warnings.push_back(
        "wall or barrier height times dt exceeds pi/2 hbar; the split step aliases such heights");
  }
  return res;
}

void to_json(nlohmann::json& j, const FidelityReport& r) {
  nlohmann::json norms = nlohmann::json::array();
  for (const auto& [label, n] : r.step_norms) norms.push_back({{"label", label}, {"norm", n}});
  j = {{"fidelity", r.fidelity},
       {"fidelity_raw", r.fidelity_raw},
       {"fidelity_fit", r.fidelity_fit},
       {"fit_quadratic_phase", r.fit_quadratic_phase},
       {"vacancy_leakage", r.vacancy_leakage},
       {"wall_leakage", r.wall_leakage},
       {"output_norm", r.output_norm},
       {"norm_drift", r.norm_drift},
       {"dominant_level", r.dominant_level},
       {"steps", r.steps},
       {"step_norms", norms},
       {"warnings", r.warnings}};
}

void to_json(nlohmann::json& j, const ResolvedKnobs& k) {
  j = {{"barrier_ramp_time", k.barrier_ramp_time},
       {"barrier_height", k.barrier_height},
       {"barrier_half_width", k.barrier_half_width},
       {"compression_time", k.compression_time},
       {"wall_height", k.wall_height},
       {"wall_edge", k.wall_edge},
       {"dt", k.dt},
       {"M", k.M},
       {"scheme", to_string(k.scheme)},
       {"e_max", k.e_max}};
}

}  // namespace hotel::dynamics
