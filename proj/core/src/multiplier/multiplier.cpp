#include "hotel/multiplier/multiplier.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "../detail/parallel.hpp"
#include "hotel/error.hpp"

namespace hotel::multiplier {

namespace {

constexpr double kPi = std::numbers::pi;
using optics::ComplexGrid;

double rel_diff(double a, double b) { return std::abs(a - b) / std::max(std::abs(a), std::abs(b)); }

// Plane spacing after a lens from a plane of the given pitch.
double conjugate_pitch(const MultiplierConfig& c, double pitch) {
  return c.sorter.wavelength * c.sorter.f / (static_cast<double>(c.grid.n) * pitch);
}

ComplexGrid phase_grid(const optics::GridSpec& g, double pitch, auto phase) {
  const auto n = static_cast<Eigen::Index>(g.n);
  ComplexGrid m(n, n);
  const double centre = static_cast<double>(g.n / 2);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double x = (static_cast<double>(j) - centre) * pitch;
    for (Eigen::Index i = 0; i < n; ++i) {
      m(i, j) = std::polar(1.0, phase(x, (static_cast<double>(i) - centre) * pitch));
    }
  }
  return m;
}

// Scale row i of the field by factor[i].
void scale_rows(Field2D& e, const std::vector<cplx>& factor) {
  for (Eigen::Index j = 0; j < e.samples.cols(); ++j) {
    for (Eigen::Index i = 0; i < e.samples.rows(); ++i) e.samples(i, j) *= factor[static_cast<std::size_t>(i)];
  }
}

// Spectrum rows use the multiplier's ring as reference for projections.
optics::OamSpectrum spectrum(const Field2D& e, int l_max, optics::SpectrumMethod method,
                             const MultiplierConfig& c) {
  return optics::oam_spectrum(e, l_max, method, &c.ring);
}

}  // namespace

void validate(const MultiplierConfig& c) {
  optics::validate(c.grid);
  optics::validate(c.sorter);
  optics::validate(c.fanout);
  if (c.p < 1) throw DomainError("p must be at least 1");
  if (c.fanout.copies != c.p) throw DomainError("fan-out copies must equal p");
  if (c.strip_pixels == 0 || c.strip_pixels * static_cast<std::size_t>(c.p) > c.grid.n) {
    throw DomainError("p strips do not fit in the grid");
  }
  if (!(c.ring.radius > 0.0) || !(c.ring.width > 0.0)) throw DomainError("ring must be positive");
  const double strip_du = conjugate_pitch(c, c.grid.pitch);
  const double strip_width = static_cast<double>(c.strip_pixels) * strip_du;
  if (rel_diff(2.0 * kPi * c.sorter.a, strip_width) > 1e-9) {
    throw DomainError("sorter scale a does not span the strip");
  }
  // copies land lambda f / period apart in the image plane; they must tile
  if (rel_diff(c.sorter.wavelength * c.sorter.f / c.fanout.period, strip_width) > 1e-9) {
    throw DomainError("fan-out period does not place copies one strip apart");
  }
}

MultiplierConfig default_multiplier(int p, const optics::GridSpec& grid, double wavelength,
                                    double radius_fraction, double width_fraction) {
  optics::validate(grid);
  if (p < 1 || p % 2 == 0) throw DomainError("the symmetric fan-out needs odd p");
  MultiplierConfig c;
  c.grid = grid;
  c.p = p;
  const double n = static_cast<double>(grid.n);
  if (!(radius_fraction > 0.0) || !(width_fraction > 0.0)) throw DomainError("ring fractions must be positive");
  c.ring.radius = radius_fraction * n * grid.pitch;
  c.ring.width = width_fraction * c.ring.radius;
  c.strip_pixels = static_cast<std::size_t>(std::floor(n / (p + 0.2)));
  c.sorter = optics::default_sorter(grid, c.ring, c.strip_pixels, wavelength);
  c.fanout.mu = optics::kBalancedMu;
  c.fanout.copies = p;
  // fan-out plane pitch is conjugate to the strip pitch
  const double fan_pitch = conjugate_pitch(c, conjugate_pitch(c, grid.pitch));
  c.fanout.period = n * fan_pitch / static_cast<double>(c.strip_pixels);
  validate(c);
  return c;
}

Annulus design_annulus(const MultiplierConfig& c) {
  return {std::max(0.0, c.ring.radius - 2.0 * c.ring.width), c.ring.radius + 2.0 * c.ring.width};
}

double fraction_outside(const Field2D& e, const Annulus& a) {
  double out = 0.0;
  double all = 0.0;
  for (std::size_t j = 0; j < e.nx(); ++j) {
    for (std::size_t i = 0; i < e.ny(); ++i) {
      const double p = std::norm(e.samples(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
      const double r = std::hypot(e.x(j), e.y(i));
      all += p;
      if (r < a.inner || r > a.outer) out += p;
    }
  }
  return all > 0.0 ? out / all : 0.0;
}

OamMultiplier::OamMultiplier(MultiplierConfig c) : cfg_(std::move(c)) {
  validate(cfg_);
  const auto& s = cfg_.sorter;
  const double du = conjugate_pitch(cfg_, cfg_.grid.pitch);
  mask1_ = phase_grid(cfg_.grid, cfg_.grid.pitch,
                      [&](double x, double y) { return optics::sorter_phase1(x, y, s); });
  mask2_ = phase_grid(cfg_.grid, du, [&](double u, double v) { return optics::sorter_phase2(u, v, s); });

  const auto n = cfg_.grid.n;
  const double centre = static_cast<double>(n / 2);
  const double fan_pitch = conjugate_pitch(cfg_, du);
  grating_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double y = (static_cast<double>(i) - centre) * fan_pitch;
    grating_[i] = std::polar(1.0, optics::fanout_grating_phase(y, cfg_.fanout));
  }

  // each copy's segment of the image plane gets the conjugate of its order phase
  const auto phases = optics::fanout_phase_correction(cfg_.fanout);
  const double img_pitch = conjugate_pitch(cfg_, fan_pitch);
  const double spacing = s.wavelength * s.f / cfg_.fanout.period;
  correction_.assign(n, cplx{1.0, 0.0});
  for (const auto& [k, arg] : phases) {
    const double lo = -kPi * s.a + k * spacing - 0.5 * img_pitch;
    const double hi = kPi * s.a + k * spacing - 0.5 * img_pitch;
    for (std::size_t i = 0; i < n; ++i) {
      const double v = (static_cast<double>(i) - centre) * img_pitch;
      if (v >= lo && v < hi) correction_[i] = std::polar(1.0, -arg);
    }
  }
}

Field2D OamMultiplier::unwrap(const Field2D& e) const {
  if (e.nx() != cfg_.grid.n || e.ny() != cfg_.grid.n || e.pitch_x != cfg_.grid.pitch ||
      e.pitch_y != cfg_.grid.pitch) {
    throw GeometryMismatch("field does not match the multiplier grid");
  }
  Field2D in = e;
  in.samples = in.samples.cwiseProduct(mask1_);
  Field2D out = optics::fourier_lens(in, cfg_.sorter.f);
  out.samples = out.samples.cwiseProduct(mask2_);
  out.plane = "unwrapped";
  return out;
}

Field2D OamMultiplier::fan_out(const Field2D& strip) const {
  Field2D fan = optics::inverse_fourier_lens(strip, cfg_.sorter.f);
  scale_rows(fan, grating_);
  Field2D img = optics::fourier_lens(fan, cfg_.sorter.f);
  if (cfg_.phase_correction) scale_rows(img, correction_);
  img.plane = "copies";
  return img;
}

Field2D OamMultiplier::demagnify(const Field2D& copies) const {
  // exact 1/p rescale along v; sqrt p keeps the power of the covered rows
  Field2D out = copies;
  out.samples.setZero();
  const auto n = static_cast<long>(cfg_.grid.n);
  const long half = n / 2;
  const double gain = std::sqrt(static_cast<double>(cfg_.p));
  for (long j = 0; j < n; ++j) {
    const long src = cfg_.p * (j - half) + half;
    if (src < 0 || src >= n) continue;
    out.samples.row(j) = gain * copies.samples.row(src);
  }
  out.plane = "demagnified";
  return out;
}

Field2D OamMultiplier::wrap(const Field2D& strip) const {
  Field2D in = strip;
  in.samples = in.samples.cwiseProduct(mask2_.conjugate());
  Field2D out = optics::inverse_fourier_lens(in, cfg_.sorter.f);
  out.samples = out.samples.cwiseProduct(mask1_.conjugate());
  out.plane = "wrapped";
  return out;
}

MultiplyResult OamMultiplier::multiply(const Field2D& e) const {
  MultiplyResult r;
  r.outside_fraction = fraction_outside(e, design_annulus(cfg_));
  if (r.outside_fraction > 0.05) {
    std::ostringstream msg;
    msg << "input has " << 100.0 * r.outside_fraction << "% of its power outside the design annulus";
    r.warnings.push_back(msg.str());
  }
  r.field = wrap(demagnify(fan_out(unwrap(e))));
  r.field.plane = "output";
  return r;
}

MultiplyResult multiply_oam(const Field2D& e, const MultiplierConfig& c) {
  return OamMultiplier(c).multiply(e);
}

double CrosstalkMatrix::at(int in, int out) const {
  const auto it = std::find(l_in.begin(), l_in.end(), in);
  if (it == l_in.end() || std::abs(out) > l_out_max) throw DomainError("no such crosstalk entry");
  return power[static_cast<std::size_t>(it - l_in.begin())][static_cast<std::size_t>(out + l_out_max)];
}

CrosstalkMatrix crosstalk_matrix(const OamMultiplier& m, const std::vector<int>& l_in,
                                 int l_out_max, optics::SpectrumMethod method, unsigned threads) {
  const auto& c = m.config();
  if (l_in.empty()) throw DomainError("crosstalk needs at least one input mode");
  int worst = 0;
  for (int l : l_in) worst = std::max(worst, std::abs(l));
  if (c.p * worst > l_out_max) throw DomainError("output window misses the mapped modes");

  CrosstalkMatrix x;
  x.l_in = l_in;
  x.l_out_max = l_out_max;
  const double fanout_loss = 1.0 - optics::fanout_efficiency(c.fanout);
  const std::size_t rows_n = l_in.size();
  x.power.resize(rows_n);
  std::vector<double> off_row(rows_n), sorter_row(rows_n);
  detail::parallel_for(rows_n, threads, [&](std::size_t r) {
    const int l = l_in[r];
    const Field2D in = optics::make_oam_mode(l, c.ring, c.grid, c.sorter.wavelength, l_out_max);
    const auto s = spectrum(m.multiply(in).field, l_out_max, method, c);
    x.power[r] = s.power;
    off_row[r] = 1.0 - s.at(c.p * l);
    sorter_row[r] = 1.0 - spectrum(m.wrap(m.unwrap(in)), l_out_max, method, c).at(l);
  });
  double sorter = 0.0;
  double off = 0.0;
  for (std::size_t r = 0; r < rows_n; ++r) {
    sorter += sorter_row[r];
    off += off_row[r];
  }
  const double rows = static_cast<double>(rows_n);
  x.budget.fanout_loss = fanout_loss;
  x.budget.sorter_leakage = sorter / rows;
  x.budget.seam = std::max(0.0, off / rows - fanout_loss - x.budget.sorter_leakage);
  return x;
}

int count_petals(const optics::RingProfile& ring) {
  const std::size_t n = ring.intensity.size();
  if (n < 8) throw DomainError("ring profile too short");
  // harmonic powers of the intensity, DC excluded
  std::vector<double> power(n / 2, 0.0);
  for (std::size_t h = 1; h < n / 2; ++h) {
    cplx acc{0.0, 0.0};
    for (std::size_t t = 0; t < n; ++t) {
      acc += ring.intensity[t] * std::polar(1.0, -2.0 * kPi * static_cast<double>(h * t) / n);
    }
    power[h] = std::norm(acc);
  }
  std::size_t best = 1;
  for (std::size_t h = 1; h < power.size(); ++h) {
    if (power[h] > power[best]) best = h;
  }
  double runner = 0.0;
  for (std::size_t h = 1; h < power.size(); ++h) {
    if (h != best) runner = std::max(runner, power[h]);
  }
  if (runner >= 0.9 * power[best]) {
    std::ostringstream msg;
    msg << "ring intensity harmonics are ambiguous: " << best << " vs a runner-up at "
        << runner / power[best] << " of its power";
    throw AmbiguousHarmonicError(msg.str());
  }
  return static_cast<int>(best);
}

double visibility(const optics::RingProfile& ring) {
  const auto [lo, hi] = std::minmax_element(ring.intensity.begin(), ring.intensity.end());
  return (*hi - *lo) / (*hi + *lo);
}

PetalResult petal_test(int l, const OamMultiplier& m) {
  if (l < 1) throw DomainError("petal test needs a positive l");
  const auto& c = m.config();
  const int l_max = c.p * l;
  const Field2D plus = optics::make_oam_mode(l, c.ring, c.grid, c.sorter.wavelength, l_max);
  const Field2D minus = optics::make_oam_mode(-l, c.ring, c.grid, c.sorter.wavelength, l_max);
  Field2D in = plus;
  in.samples = (plus.samples + minus.samples) / std::sqrt(2.0);

  PetalResult r;
  r.ring_in = optics::ring_intensity(in);
  r.ring_out = optics::ring_intensity(m.multiply(in).field);
  r.petals_in = count_petals(r.ring_in);
  r.petals_out = count_petals(r.ring_out);
  r.visibility_in = visibility(r.ring_in);
  r.visibility_out = visibility(r.ring_out);
  return r;
}

}  // namespace hotel::multiplier
