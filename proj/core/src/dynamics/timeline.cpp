#include "hotel/dynamics/timeline.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "hotel/error.hpp"

namespace hotel::dynamics {

namespace {

constexpr double kEdgeCut = 20.0;  // tanh(20) == 1 in double precision

// 0 below x0, 1 above, smooth over `edge`.
double step(double x, double x0, double edge) noexcept {
  if (edge <= 0.0) return x > x0 ? 1.0 : (x == x0 ? 0.5 : 0.0);
  const double u = (x - x0) / edge;
  if (u <= -kEdgeCut) return 0.0;
  if (u >= kEdgeCut) return 1.0;
  return 0.5 * (1.0 + std::tanh(u));
}

// Index range of sorted xs inside [lo, hi].
std::pair<std::size_t, std::size_t> index_range(std::span<const double> xs, double lo, double hi) {
  const auto b = std::lower_bound(xs.begin(), xs.end(), lo);
  const auto e = std::upper_bound(b, xs.end(), hi);
  return {static_cast<std::size_t>(b - xs.begin()), static_cast<std::size_t>(e - xs.begin())};
}

void check_feature(const PotentialFeature& f) {
  std::visit(
      [](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, UniformOffset>) {
          if (!(v.hi >= v.lo)) throw DomainError("offset interval must have hi >= lo");
        } else if constexpr (std::is_same_v<T, Barrier>) {
          if (v.height < 0.0 || v.half_width < 0.0 || v.edge < 0.0) {
            throw DomainError("barrier height, half width and edge must be >= 0");
          }
        } else {
          if (v.height < 0.0 || v.edge < 0.0) {
            throw DomainError("wall height and edge must be >= 0");
          }
          if (v.end > v.start) throw DomainError("moving wall must move inward (end <= start)");
        }
      },
      f);
}

}  // namespace

double raised_cosine(double a, double b, double s) noexcept {
  s = std::clamp(s, 0.0, 1.0);
  return a + (b - a) * 0.5 * (1.0 - std::cos(std::numbers::pi * s));
}

PotentialTimeline::PotentialTimeline(std::vector<Segment> segments) {
  for (auto& s : segments) add(std::move(s));
}

void PotentialTimeline::add(Segment seg) {
  if (!(seg.duration > 0.0) || !std::isfinite(seg.duration)) {
    throw DomainError("timeline segment durations must be positive");
  }
  for (const auto& f : seg.features) check_feature(f);
  segments_.push_back(std::move(seg));
}

double PotentialTimeline::duration() const noexcept {
  double t = 0.0;
  for (const auto& s : segments_) t += s.duration;
  return t;
}

std::size_t PotentialTimeline::segment_at(double t) const {
  if (segments_.empty()) throw DomainError("empty timeline");
  double acc = 0.0;
  for (std::size_t k = 0; k < segments_.size(); ++k) {
    acc += segments_[k].duration;
    if (t < acc) return k;
  }
  return segments_.size() - 1;
}

double PotentialTimeline::segment_start(std::size_t k) const {
  double acc = 0.0;
  for (std::size_t i = 0; i < k && i < segments_.size(); ++i) acc += segments_[i].duration;
  return acc;
}

double PotentialTimeline::max_potential() const {
  double top = 0.0;
  for (const auto& seg : segments_) {
    double offsets = 0.0;
    for (const auto& f : seg.features) {
      std::visit(
          [&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, UniformOffset>) {
              offsets = std::max(offsets, v.value);
            } else if constexpr (std::is_same_v<T, Barrier>) {
              top = std::max(top, v.height * std::max(v.from_fraction, v.to_fraction));
            } else {
              top = std::max(top, v.height);
            }
          },
          f);
    }
    top = std::max(top, offsets);
  }
  return top;
}

void PotentialTimeline::evaluate(std::size_t k, double s, std::span<const double> xs,
                                 std::span<double> out) const {
  if (xs.size() != out.size()) throw DomainError("potential output size mismatch");
  std::fill(out.begin(), out.end(), 0.0);
  if (k >= segments_.size()) return;
  for (const auto& f : segments_[k].features) {
    std::visit(
        [&](const auto& v) {
          using T = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<T, UniformOffset>) {
            const auto [b, e] = index_range(xs, v.lo, v.hi);
            for (std::size_t j = b; j < e; ++j) out[j] += v.value;
          } else if constexpr (std::is_same_v<T, Barrier>) {
            const double h = v.height * raised_cosine(v.from_fraction, v.to_fraction, s);
            if (h == 0.0) return;
            const double lo = v.center - v.half_width;
            const double hi = v.center + v.half_width;
            const double pad = kEdgeCut * v.edge;
            const auto [b, e] = index_range(xs, lo - pad, hi + pad);
            for (std::size_t j = b; j < e; ++j) {
              out[j] += h * (step(xs[j], lo, v.edge) - step(xs[j], hi, v.edge));
            }
          } else {
            const double pos = v.start + (v.end - v.start) * std::clamp(s, 0.0, 1.0);
            const double pad = kEdgeCut * v.edge;
            const auto [b, e] = index_range(xs, pos - pad, pos + pad);
            for (std::size_t j = b; j < e; ++j) out[j] += v.height * step(xs[j], pos, v.edge);
            for (std::size_t j = e; j < xs.size(); ++j) out[j] += v.height;
          }
        },
        f);
  }
}

void PotentialTimeline::evaluate(double t, std::span<const double> xs,
                                 std::span<double> out) const {
  const std::size_t k = segment_at(t);
  const double s = (t - segment_start(k)) / segments_[k].duration;
  evaluate(k, s, xs, out);
}

double hard_wall_offset(double height, double edge, const well::PhysicalConstants& c) {
  if (!(height > 0.0) || edge < 0.0) throw DomainError("wall height must be > 0 and edge >= 0");
  const double q0 = 2.0 * c.mass / (c.hbar * c.hbar);
  const double kappa = std::sqrt(q0 * height);
  if (edge == 0.0) return 1.0 / kappa;
  // Riccati form y = psi'/psi of the zero-energy solution decaying into the
  // wall, integrated (RK4) from deep inside out to where V vanishes; there
  // psi is linear and y = 1 / (x - x_eff).
  const double deep = kEdgeCut * edge + 40.0 / kappa;
  const double free = -kEdgeCut * edge;
  const double h = -std::min(edge, 1.0 / kappa) / 200.0;
  const auto n = static_cast<std::size_t>(std::ceil((free - deep) / h));
  const double hs = (free - deep) / static_cast<double>(n);
  auto f = [&](double x, double y) { return q0 * height * step(x, 0.0, edge) - y * y; };
  double x = deep;
  double y = -kappa;
  for (std::size_t i = 0; i < n; ++i) {
    const double k1 = f(x, y);
    const double k2 = f(x + 0.5 * hs, y + 0.5 * hs * k1);
    const double k3 = f(x + 0.5 * hs, y + 0.5 * hs * k2);
    const double k4 = f(x + hs, y + hs * k3);
    y += hs / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    x += hs;
  }
  return free - 1.0 / y;
}

void to_json(nlohmann::json& j, const PotentialTimeline& tl) {
  j = nlohmann::json::array();
  for (const auto& seg : tl.segments()) {
    nlohmann::json feats = nlohmann::json::array();
    for (const auto& f : seg.features) {
      std::visit(
          [&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, UniformOffset>) {
              feats.push_back({{"type", "offset"}, {"lo", v.lo}, {"hi", v.hi}, {"value", v.value}});
            } else if constexpr (std::is_same_v<T, Barrier>) {
              feats.push_back({{"type", "barrier"},
                               {"center", v.center},
                               {"half_width", v.half_width},
                               {"height", v.height},
                               {"from_fraction", v.from_fraction},
                               {"to_fraction", v.to_fraction},
                               {"edge", v.edge}});
            } else {
              feats.push_back({{"type", "wall"},
                               {"start", v.start},
                               {"end", v.end},
                               {"height", v.height},
                               {"edge", v.edge}});
            }
          },
          f);
    }
    j.push_back({{"label", seg.label}, {"duration", seg.duration}, {"features", feats}});
  }
}

}  // namespace hotel::dynamics
