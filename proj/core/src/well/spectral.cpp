#include "hotel/well/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "hotel/error.hpp"
#include "hotel/well/trig.hpp"

namespace hotel::well {

namespace {

constexpr double kPi = std::numbers::pi;

void require_same_geometry(const SpectralState& a, const SpectralState& b, const char* op) {
  if (!(a.geometry == b.geometry)) {
    std::ostringstream msg;
    msg << op << ": geometry mismatch (width " << a.geometry.width << " origin "
        << a.geometry.origin << " vs width " << b.geometry.width << " origin "
        << b.geometry.origin << ")";
    throw GeometryMismatch(msg.str());
  }
}

cplx partial_sum(const SpectralState& s, double xi, std::size_t count) {
  cplx acc{0.0, 0.0};
  for (std::size_t k = 0; k < count; ++k) {
    acc += s.amps[static_cast<Eigen::Index>(k)] * sinpi(static_cast<double>(k + 1) * xi);
  }
  return acc * std::sqrt(2.0 / s.geometry.width);
}

double relative_position(const SpectralState& s, double x) {
  const auto& g = s.geometry;
  if (x < g.origin || x > g.end()) {
    std::ostringstream msg;
    msg << "position " << x << " outside well [" << g.origin << ", " << g.end() << "]";
    throw DomainError(msg.str());
  }
  return (x - g.origin) / g.width;
}

}  // namespace

Amplitudes apply_real(const Eigen::MatrixXd& m, const Amplitudes& v) {
  const Eigen::VectorXd re = m * v.real();
  const Eigen::VectorXd im = m * v.imag();
  Amplitudes out(re.size());
  out.real() = re;
  out.imag() = im;
  return out;
}

bool WellGeometry::contains(const WellGeometry& other, double tol) const noexcept {
  const double slack = tol * std::max(width, other.width);
  return other.origin >= origin - slack && other.end() <= end() + slack;
}

void validate(const WellGeometry& g) {
  if (!(g.width > 0.0) || !std::isfinite(g.width) || !std::isfinite(g.origin)) {
    throw DomainError("well width must be positive and finite");
  }
}

void validate(const PhysicalConstants& c) {
  if (!(c.hbar > 0.0) || !(c.mass > 0.0)) {
    throw DomainError("hbar and mass must be positive");
  }
}

SpectralState::SpectralState(WellGeometry g, Amplitudes a) : geometry(g), amps(std::move(a)) {
  validate(geometry);
  if (amps.size() < 1) throw DomainError("a spectral state needs at least one mode");
}

cplx SpectralState::amp(std::size_t n) const noexcept {
  if (n == 0 || n > modes()) return {0.0, 0.0};
  return amps[static_cast<Eigen::Index>(n - 1)];
}

bool is_normalized(const SpectralState& s, double tol) {
  return std::abs(s.norm_squared() - 1.0) <= tol;
}

double omega0(double width, const PhysicalConstants& c) {
  return c.hbar * kPi * kPi / (2.0 * c.mass * width * width);
}

double energy(std::size_t n, double width, const PhysicalConstants& c) {
  const double nn = static_cast<double>(n);
  return c.hbar * omega0(width, c) * nn * nn;
}

double revival_time(double width, const PhysicalConstants& c) {
  return 2.0 * kPi / omega0(width, c);
}

double eigenfunction(std::size_t n, double x, const WellGeometry& g) {
  validate(g);
  if (n == 0) throw DomainError("quantum numbers start at 1");
  if (x < g.origin || x > g.end()) {
    std::ostringstream msg;
    msg << "eigenfunction evaluated at " << x << " outside [" << g.origin << ", " << g.end()
        << "]";
    throw DomainError(msg.str());
  }
  return std::sqrt(2.0 / g.width) * sinpi(static_cast<double>(n) * (x - g.origin) / g.width);
}

SpectralState basis_state(const WellGeometry& g, std::size_t n, std::size_t modes) {
  if (n == 0 || n > modes) throw DomainError("basis index outside truncation");
  Amplitudes a = Amplitudes::Zero(static_cast<Eigen::Index>(modes));
  a[static_cast<Eigen::Index>(n - 1)] = 1.0;
  return {g, std::move(a)};
}

SpectralState free_evolve(const SpectralState& s, double t, const PhysicalConstants& c) {
  if (t < 0.0) throw DomainError("free_evolve needs t >= 0");
  validate(c);
  // Phase in units of pi reduced before the trig call: E_n t / hbar grows
  // like n^2 and loses digits otherwise.
  const double w = omega0(s.geometry.width, c) * t / kPi;
  const double frac = w - 2.0 * std::floor(w / 2.0);
  SpectralState out = s;
  for (Eigen::Index k = 0; k < out.amps.size(); ++k) {
    const double n = static_cast<double>(k + 1);
    const double q = std::fmod(n * n * frac, 2.0);
    out.amps[k] *= cplx(cospi(q), -sinpi(q));
  }
  return out;
}

SpectralState mirror(const SpectralState& s) {
  SpectralState out = s;
  for (Eigen::Index k = 1; k < out.amps.size(); k += 2) out.amps[k] = -out.amps[k];
  return out;
}

SpectralState scaled(const SpectralState& s, cplx factor) {
  SpectralState out = s;
  out.amps *= factor;
  return out;
}

cplx overlap(const SpectralState& a, const SpectralState& b) {
  require_same_geometry(a, b, "overlap");
  const Eigen::Index n = std::min(a.amps.size(), b.amps.size());
  return a.amps.head(n).dot(b.amps.head(n));  // Eigen's dot conjugates the left side
}

double fidelity(const SpectralState& a, const SpectralState& b) { return std::norm(overlap(a, b)); }

Eigen::MatrixXd projection_matrix(const WellGeometry& from, std::size_t from_modes,
                                  const WellGeometry& to, std::size_t to_modes) {
  validate(from);
  validate(to);
  const double lo = std::max(from.origin, to.origin);
  const double hi = std::min(from.end(), to.end());
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(to_modes),
                                            static_cast<Eigen::Index>(from_modes));
  if (!(hi > lo)) return p;

  const double span = hi - lo;
  const double mid = 0.5 * (lo + hi);
  const double s1 = (mid - from.origin) / from.width;
  const double s2 = (mid - to.origin) / to.width;
  const double d1 = span / (2.0 * from.width);
  const double d2 = span / (2.0 * to.width);
  const double scale = span / std::sqrt(from.width * to.width);

  for (std::size_t n = 1; n <= from_modes; ++n) {
    const double nn = static_cast<double>(n);
    const double ns = nn * s1;
    const double nd = nn * d1;
    for (std::size_t m = 1; m <= to_modes; ++m) {
      const double mm = static_cast<double>(m);
      const double ms = mm * s2;
      const double md = mm * d2;
      const double diff = cospi(ns - ms) * sincpi(nd - md);
      const double sum = cospi(ns + ms) * sincpi(nd + md);
      p(static_cast<Eigen::Index>(m - 1), static_cast<Eigen::Index>(n - 1)) = scale * (diff - sum);
    }
  }
  return p;
}

SpectralState rebase(const SpectralState& s, const WellGeometry& target, std::size_t modes) {
  validate(target);
  if (!target.contains(s.geometry)) {
    throw DomainError("rebase: target well does not contain the source well");
  }
  if (modes == 0) throw DomainError("rebase: need at least one target mode");
  const Eigen::MatrixXd p = projection_matrix(s.geometry, s.modes(), target, modes);
  return {target, apply_real(p, s.amps)};
}

SpectralState restrict_to(const SpectralState& s, const WellGeometry& target, std::size_t modes) {
  validate(target);
  if (!s.geometry.contains(target)) {
    throw DomainError("restrict_to: target interval lies outside the source well");
  }
  if (modes == 0) throw DomainError("restrict_to: need at least one target mode");
  const Eigen::MatrixXd p = projection_matrix(s.geometry, s.modes(), target, modes);
  return {target, apply_real(p, s.amps)};
}

cplx evaluate(const SpectralState& s, double x) {
  return partial_sum(s, relative_position(s, x), s.modes());
}

Eigen::VectorXcd evaluate(const SpectralState& s, std::span<const double> xs) {
  Eigen::VectorXcd out(static_cast<Eigen::Index>(xs.size()));
  const double norm = std::sqrt(2.0 / s.geometry.width);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double xi = relative_position(s, xs[i]);
    // sin(n theta) by rotating e^{i theta}; drift is O(n eps), ample for plotting
    // and peak estimates.
    const cplx step(cospi(xi), sinpi(xi));
    cplx rot = step;
    cplx acc{0.0, 0.0};
    for (Eigen::Index k = 0; k < s.amps.size(); ++k) {
      acc += s.amps[k] * rot.imag();
      rot *= step;
    }
    out[static_cast<Eigen::Index>(i)] = acc * norm;
  }
  return out;
}

cplx evaluate_extrapolated(const SpectralState& s, double x) {
  const double xi = relative_position(s, x);
  const std::size_t top = s.modes() - s.modes() % 4;
  if (top < 16) return partial_sum(s, xi, s.modes());
  const cplx full = partial_sum(s, xi, top);
  const cplx half = partial_sum(s, xi, top / 2);
  const cplx quarter = partial_sum(s, xi, top / 4);
  return (16.0 * full - 10.0 * half + quarter) / 7.0;
}

double peak_magnitude(const SpectralState& s, std::size_t samples) {
  if (samples == 0) samples = std::max<std::size_t>(256, 8 * s.modes());
  std::vector<double> xs(samples);
  for (std::size_t i = 0; i < samples; ++i) {
    xs[i] = s.geometry.origin + s.geometry.width * (static_cast<double>(i) + 0.5) /
                                    static_cast<double>(samples);
  }
  return evaluate(s, xs).cwiseAbs().maxCoeff();
}

SpectralState random_state(const WellGeometry& g, std::size_t support, std::size_t modes,
                           unsigned long long seed) {
  if (support == 0 || support > modes) throw DomainError("random_state: 1 <= support <= modes");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Amplitudes a = Amplitudes::Zero(static_cast<Eigen::Index>(modes));
  for (std::size_t k = 0; k < support; ++k) {
    const double re = normal(rng);
    const double im = normal(rng);
    a[static_cast<Eigen::Index>(k)] = {re, im};
  }
  a /= a.norm();
  return {g, std::move(a)};
}

std::vector<cplx> to_vector(const SpectralState& s) {
  return {s.amps.data(), s.amps.data() + s.amps.size()};
}

}  // namespace hotel::well
