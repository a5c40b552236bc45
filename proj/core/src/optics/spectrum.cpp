#include "hotel/optics/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <fftw3.h>

#include "../detail/fftw_lock.hpp"
#include "hotel/error.hpp"

namespace hotel::optics {

namespace {

constexpr double kPi = std::numbers::pi;

// Keys cubic convolution kernel, a = -1/2.
double keys(double s) {
  s = std::abs(s);
  if (s < 1.0) return (1.5 * s - 2.5) * s * s + 1.0;
  if (s < 2.0) return ((-0.5 * s + 2.5) * s - 4.0) * s + 2.0;
  return 0.0;
}

// Interpolate at fractional (row, col); out-of-range taps are zero.
cplx bicubic(const ComplexGrid& m, double row, double col) {
  const auto r0 = static_cast<Eigen::Index>(std::floor(row));
  const auto c0 = static_cast<Eigen::Index>(std::floor(col));
  double wr[4];
  double wc[4];
  for (int k = 0; k < 4; ++k) {
    wr[k] = keys(row - static_cast<double>(r0 - 1 + k));
    wc[k] = keys(col - static_cast<double>(c0 - 1 + k));
  }
  cplx acc{0.0, 0.0};
  for (int b = 0; b < 4; ++b) {
    const Eigen::Index c = c0 - 1 + b;
    if (c < 0 || c >= m.cols()) continue;
    cplx col_acc{0.0, 0.0};
    for (int a = 0; a < 4; ++a) {
      const Eigen::Index r = r0 - 1 + a;
      if (r < 0 || r >= m.rows()) continue;
      col_acc += wr[a] * m(r, c);
    }
    acc += wc[b] * col_acc;
  }
  return acc;
}

void check_square(const Field2D& e) {
  if (e.nx() != e.ny() || e.pitch_x != e.pitch_y) {
    throw GeometryMismatch("polar analysis needs a square grid with square pixels");
  }
}

// c_l(r) for every ring: FFT along the angle, divided by the angle count.
std::vector<cplx> harmonics(const PolarField& p) {
  const int nr = static_cast<int>(p.radius_px.size());
  const int nt = static_cast<int>(p.theta.size());
  std::vector<cplx> c = p.values;
  auto* data = reinterpret_cast<fftw_complex*>(c.data());
  fftw_plan plan;
  {
    std::lock_guard lock(detail::fftw_planner_mutex());
    plan = fftw_plan_many_dft(1, &nt, nr, data, nullptr, 1, nt, data, nullptr, 1, nt,
                              FFTW_FORWARD, FFTW_ESTIMATE);
  }
  if (plan == nullptr) throw Error("FFTW failed to create an angular plan");
  fftw_execute(plan);
  {
    std::lock_guard lock(detail::fftw_planner_mutex());
    fftw_destroy_plan(plan);
  }
  for (auto& z : c) z /= static_cast<double>(nt);
  return c;
}

double mean_radius_px(const Field2D& e) {
  double w = 0.0;
  double s = 0.0;
  for (std::size_t j = 0; j < e.nx(); ++j) {
    for (std::size_t i = 0; i < e.ny(); ++i) {
      const double p = std::norm(e.samples(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
      w += p;
      s += p * std::hypot(e.x(j), e.y(i));
    }
  }
  return w > 0.0 ? s / w / e.pitch_x : 0.0;
}

}  // namespace

double OamSpectrum::at(int l) const {
  if (std::abs(l) > l_max) throw DomainError("l outside the spectrum window");
  return power[static_cast<std::size_t>(l + l_max)];
}

cplx OamSpectrum::amplitude(int l) const {
  if (std::abs(l) > l_max) throw DomainError("l outside the spectrum window");
  return overlap[static_cast<std::size_t>(l + l_max)];
}

double OamSpectrum::total() const noexcept {
  double s = 0.0;
  for (double p : power) s += p;
  return s;
}

int OamSpectrum::dominant() const {
  const auto it = std::max_element(power.begin(), power.end());
  return static_cast<int>(it - power.begin()) - l_max;
}

PolarField polar_resample(const Field2D& e, const PolarSampling& polar) {
  check_square(e);
  if (polar.radii < 2 || polar.angles < 4) throw DomainError("polar sampling too small");
  PolarField p;
  const double r_max = polar.r_max_fraction * static_cast<double>(e.nx());
  for (int k = 0; k < polar.radii; ++k) {
    p.radius_px.push_back(polar.r_min_px + (r_max - polar.r_min_px) * k / (polar.radii - 1));
  }
  for (int t = 0; t < polar.angles; ++t) p.theta.push_back(2.0 * kPi * t / polar.angles);
  const double centre = static_cast<double>(e.nx() / 2);
  p.values.reserve(p.radius_px.size() * p.theta.size());
  for (double r : p.radius_px) {
    for (double t : p.theta) {
      p.values.push_back(bicubic(e.samples, centre + r * std::sin(t), centre + r * std::cos(t)));
    }
  }
  return p;
}

OamSpectrum oam_spectrum(const Field2D& e, int l_max, SpectrumMethod method, const Ring* ring,
                         const PolarSampling& polar) {
  if (l_max < 0) throw DomainError("l_max must be non-negative");
  check_square(e);
  const double total = e.power();
  if (!(total > 0.0)) throw DomainError("cannot take the spectrum of a zero field");

  OamSpectrum s;
  s.l_max = l_max;
  s.method = method;
  const auto width = static_cast<std::size_t>(2 * l_max + 1);
  s.power.assign(width, 0.0);
  s.overlap.assign(width, cplx{0.0, 0.0});

  if (method == SpectrumMethod::projective) {
    if (ring == nullptr) throw DomainError("projective spectrum needs a reference ring");
    const GridSpec g{e.nx(), e.pitch_x};
    for (int l = -l_max; l <= l_max; ++l) {
      const cplx c = inner(make_oam_mode(l, *ring, g, e.wavelength, l_max), e) / std::sqrt(total);
      s.overlap[static_cast<std::size_t>(l + l_max)] = c;
      s.power[static_cast<std::size_t>(l + l_max)] = std::norm(c);
    }
    return s;
  }

  if (2 * l_max >= polar.angles) {
    throw SamplingError("angular sampling cannot resolve the harmonic window");
  }
  const double r_bar = mean_radius_px(e);
  if (l_max > 0 && 2.0 * kPi * r_bar / l_max < 4.0) {
    std::ostringstream msg;
    msg << "l_max = " << l_max << " is undersampled at the mean radius " << r_bar << " px";
    throw SamplingError(msg.str());
  }
  const PolarField p = polar_resample(e, polar);
  const std::vector<cplx> c = harmonics(p);
  const int nt = polar.angles;
  const double dr = p.radius_px[1] - p.radius_px[0];
  const double px_power = e.samples.squaredNorm();
  for (int l = -l_max; l <= l_max; ++l) {
    const int col = ((l % nt) + nt) % nt;
    double acc = 0.0;
    double peak = -1.0;
    cplx at_peak{0.0, 0.0};
    for (std::size_t k = 0; k < p.radius_px.size(); ++k) {
      const cplx z = c[k * static_cast<std::size_t>(nt) + static_cast<std::size_t>(col)];
      const double w = std::norm(z) * p.radius_px[k];
      acc += w;
      if (w > peak) {
        peak = w;
        at_peak = z;
      }
    }
    const double frac = acc * 2.0 * kPi * dr / px_power;
    s.power[static_cast<std::size_t>(l + l_max)] = frac;
    s.overlap[static_cast<std::size_t>(l + l_max)] =
        std::abs(at_peak) > 0.0 ? std::sqrt(frac) * at_peak / std::abs(at_peak) : cplx{0.0, 0.0};
  }
  return s;
}

RingProfile ring_intensity(const Field2D& e, const PolarSampling& polar) {
  const PolarField p = polar_resample(e, polar);
  const std::size_t nt = p.theta.size();
  std::size_t best = 0;
  double best_power = -1.0;
  for (std::size_t k = 0; k < p.radius_px.size(); ++k) {
    double s = 0.0;
    for (std::size_t t = 0; t < nt; ++t) s += std::norm(p.values[k * nt + t]);
    s *= p.radius_px[k];
    if (s > best_power) {
      best_power = s;
      best = k;
    }
  }
  RingProfile out;
  out.radius = p.radius_px[best] * e.pitch_x;
  out.theta = p.theta;
  for (std::size_t t = 0; t < nt; ++t) out.intensity.push_back(std::norm(p.values[best * nt + t]));
  return out;
}

}  // namespace hotel::optics
