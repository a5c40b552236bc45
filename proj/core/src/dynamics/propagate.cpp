#include "hotel/dynamics/propagate.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hotel/error.hpp"

namespace hotel::dynamics {

namespace {

bool time_dependent(const Segment& seg) {
  for (const auto& f : seg.features) {
    if (const auto* b = std::get_if<Barrier>(&f); b && b->from_fraction != b->to_fraction) {
      return true;
    }
    if (const auto* w = std::get_if<MovingWall>(&f); w && w->start != w->end) return true;
  }
  return false;
}

// d[j] *= f[j] with plain real arithmetic; std::complex multiplication
// carries inf/nan recovery that blocks vectorization.
void multiply(cplx* d, const cplx* f, std::size_t n) noexcept {
  auto* a = reinterpret_cast<double*>(d);
  const auto* b = reinterpret_cast<const double*>(f);
  for (std::size_t j = 0; j < n; ++j) {
    const double re = a[2 * j] * b[2 * j] - a[2 * j + 1] * b[2 * j + 1];
    const double im = a[2 * j] * b[2 * j + 1] + a[2 * j + 1] * b[2 * j];
    a[2 * j] = re;
    a[2 * j + 1] = im;
  }
}

std::size_t step_count(double length, double dt) {
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(length / dt - 1e-9)));
}

}  // namespace

std::string to_string(Scheme s) {
  return s == Scheme::StrangSine ? "strang-split-sine" : "crank-nicolson";
}

Scheme scheme_from_string(const std::string& name) {
  if (name == "strang-split-sine") return Scheme::StrangSine;
  if (name == "crank-nicolson") return Scheme::CrankNicolson;
  throw ConfigError("unknown scheme '" + name + "'");
}

void validate(const PropagatorSettings& s) {
  if (!(s.dt > 0.0) || !std::isfinite(s.dt)) throw DomainError("dt must be positive");
  if (s.wall_height < 0.0 || s.barrier_height < 0.0) {
    throw DomainError("wall and barrier heights must be >= 0");
  }
  if (!(s.norm_tolerance > 0.0)) throw DomainError("norm tolerance must be positive");
  well::validate(s.constants);
}

Propagator::Propagator(double width, std::size_t m, PropagatorSettings settings)
    : width_(width), m_(m), settings_(settings), fft_(m) {
  validate(settings_);
  if (!(width > 0.0)) throw DomainError("grid width must be positive");
  const double dx = width / static_cast<double>(m + 1);
  xs_.resize(m);
  for (std::size_t j = 0; j < m; ++j) xs_[j] = static_cast<double>(j + 1) * dx;
  energies_ = kinetic_energies(width, m, settings_.constants);
  kinetic_factor_.resize(fft_.length());
  v_.assign(m, 0.0);
  v_prev_.assign(m, 0.0);
  half_kick_.assign(m, cplx{1.0, 0.0});
}

void Propagator::kinetic(double h) {
  const std::size_t n = fft_.length();
  if (h != kinetic_h_) {
    const double hbar = settings_.constants.hbar;
    const double scale = 1.0 / static_cast<double>(n);
    // FFT index q and n - q both carry sine mode q; 0 and M + 1 are empty
    for (std::size_t k = 0; k < n; ++k) {
      const std::size_t q = k <= m_ + 1 ? k : n - k;
      const double e = q >= 1 && q <= m_ ? energies_[q - 1] : 0.0;
      kinetic_factor_[k] = std::polar(scale, -e * h / hbar);
    }
    kinetic_h_ = h;
  }
  fft_.mirror();
  fft_.forward();
  multiply(fft_.data(), kinetic_factor_.data(), n);
  fft_.backward();
}

void Propagator::advance(GridState& g, const PotentialTimeline& tl, double t0, double t1) {
  if (g.size() != m_ || std::abs(g.width - width_) > 1e-12 * width_) {
    throw GeometryMismatch("grid state does not match the propagator grid");
  }
  if (t1 < t0) throw DomainError("advance: t1 < t0");
  if (t1 == t0) return;
  if (tl.empty()) throw DomainError("advance: empty timeline");
  const double n0 = g.norm_squared();

  if (settings_.scheme == Scheme::StrangSine) {
    fft_.load(g.samples);
  } else {
    cn_c_ = g.samples;
  }

  const auto& segs = tl.segments();
  double start = 0.0;
  for (std::size_t k = 0; k < segs.size(); ++k) {
    const double end = k + 1 == segs.size() ? std::max(start + segs[k].duration, t1)
                                            : start + segs[k].duration;
    const double a = std::max(t0, start);
    const double b = std::min(t1, end);
    if (b > a) advance_piece(tl, k, a - start, b - start);
    start = end;
    if (start >= t1) break;
  }

  if (settings_.scheme == Scheme::StrangSine) {
    fft_.store(g.samples);
  } else {
    g.samples = cn_c_;
  }
  const double n1 = g.norm_squared();
  const double drift = n0 > 0.0 ? std::abs(n1 - n0) / n0 : 0.0;
  if (drift > settings_.norm_tolerance) {
    std::ostringstream msg;
    msg << "norm drifted by " << drift << " (tolerance " << settings_.norm_tolerance
        << "); try a smaller dt";
    throw InstabilityError(msg.str(), drift);
  }
}

void Propagator::advance_piece(const PotentialTimeline& tl, std::size_t k, double a, double b) {
  if (settings_.scheme == Scheme::StrangSine) {
    strang_piece(tl, k, a, b);
  } else {
    cn_piece(tl, k, a, b);
  }
}

void Propagator::strang_piece(const PotentialTimeline& tl, std::size_t k, double a, double b) {
  const Segment& seg = tl.segments()[k];
  if (seg.features.empty()) {
    kinetic(b - a);
    ++steps_;
    return;
  }
  const std::size_t n = step_count(b - a, settings_.dt);
  const double h = (b - a) / static_cast<double>(n);
  const double hbar = settings_.constants.hbar;
  cplx* d = fft_.data() + 1;  // interior samples

  if (!time_dependent(seg)) {
    // constant potential: merge the half kicks between consecutive steps
    tl.evaluate(k, 0.0, xs_, v_);
    std::vector<cplx> full(m_);
    for (std::size_t j = 0; j < m_; ++j) {
      half_kick_[j] = std::polar(1.0, -0.5 * v_[j] * h / hbar);
      full[j] = half_kick_[j] * half_kick_[j];
    }
    multiply(d, half_kick_.data(), m_);
    for (std::size_t i = 0; i < n; ++i) {
      kinetic(h);
      multiply(d, (i + 1 == n ? half_kick_ : full).data(), m_);
    }
    steps_ += n;
    v_prev_ = v_;
    return;
  }

  // time-dependent: recompute the kick only where the potential changed
  bool first = true;
  for (std::size_t i = 0; i < n; ++i) {
    const double s = (a + (static_cast<double>(i) + 0.5) * h) / seg.duration;
    tl.evaluate(k, s, xs_, v_);
    for (std::size_t j = 0; j < m_; ++j) {
      if (first || v_[j] != v_prev_[j]) half_kick_[j] = std::polar(1.0, -0.5 * v_[j] * h / hbar);
    }
    first = false;
    std::swap(v_, v_prev_);
    multiply(d, half_kick_.data(), m_);
    kinetic(h);
    multiply(d, half_kick_.data(), m_);
  }
  steps_ += n;
}

void Propagator::cn_piece(const PotentialTimeline& tl, std::size_t k, double a, double b) {
  const Segment& seg = tl.segments()[k];
  const std::size_t n = step_count(b - a, settings_.dt);
  const double h = (b - a) / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double s = (a + (static_cast<double>(i) + 0.5) * h) / seg.duration;
    tl.evaluate(k, s, xs_, v_);
    cn_step(h);
  }
  steps_ += n;
}

void Propagator::cn_step(double h) {
  // H = -hbar^2/(2 m dx^2) [1 -2 1] + V; solve (1 + i h H / 2 hbar) c' = (1 - i h H / 2 hbar) c
  const auto& c = settings_.constants;
  const double dx = width_ / static_cast<double>(m_ + 1);
  const double off = -c.hbar * c.hbar / (2.0 * c.mass * dx * dx);
  const double diag0 = -2.0 * off;
  const cplx mu{0.0, h / (2.0 * c.hbar)};
  std::vector<cplx>& psi = cn_c_;
  cn_rhs_.resize(m_);
  for (std::size_t j = 0; j < m_; ++j) {
    cplx hpsi = (diag0 + v_[j]) * psi[j];
    if (j > 0) hpsi += off * psi[j - 1];
    if (j + 1 < m_) hpsi += off * psi[j + 1];
    cn_rhs_[j] = psi[j] - mu * hpsi;
  }
  // Thomas algorithm with sub = super = mu * off
  const cplx e = mu * off;
  std::vector<cplx>& cp = cn_scratch_;
  cp.resize(m_);
  cplx denom = 1.0 + mu * (diag0 + v_[0]);
  cp[0] = e / denom;
  psi[0] = cn_rhs_[0] / denom;
  for (std::size_t j = 1; j < m_; ++j) {
    denom = 1.0 + mu * (diag0 + v_[j]) - e * cp[j - 1];
    cp[j] = e / denom;
    psi[j] = (cn_rhs_[j] - e * psi[j - 1]) / denom;
  }
  for (std::size_t j = m_ - 1; j-- > 0;) psi[j] -= cp[j] * psi[j + 1];
}

GridState propagate(const GridState& g, const PotentialTimeline& tl,
                    const PropagatorSettings& settings) {
  Propagator prop(g.width, g.size(), settings);
  GridState out = g;
  prop.advance(out, tl, 0.0, tl.duration());
  return out;
}

GridState propagate_free(const GridState& g, double t, const PropagatorSettings& settings) {
  if (t < 0.0) throw DomainError("propagate_free needs t >= 0");
  if (t == 0.0) return g;
  PotentialTimeline tl;
  tl.add({t, {}, "free"});
  return propagate(g, tl, settings);
}

}  // namespace hotel::dynamics
