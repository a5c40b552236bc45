#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include <boost/math/tools/roots.hpp>

#include "doctest.h"
#include "hotel/error.hpp"
#include "hotel/optics/fanout.hpp"
#include "hotel/optics/field.hpp"
#include "hotel/optics/sorter.hpp"
#include "hotel/optics/spectrum.hpp"
#include "oracles.hpp"

using namespace hotel;
using namespace hotel::optics;
using std::numbers::pi;

namespace {

const GridSpec kGrid{256, 8e-6};
const Ring kRing{0.3 * 256 * 8e-6, 0.06 * 256 * 8e-6};

// Fourier coefficient of exp(i arctan(2 mu cos t)) by adaptive quadrature.
cplx quadrature_order(double mu, int k) {
  const double re = oracle::integrate(
      [&](double t) { return std::cos(std::atan(2.0 * mu * std::cos(t)) - k * t); }, 0.0, 2.0 * pi);
  const double im = oracle::integrate(
      [&](double t) { return std::sin(std::atan(2.0 * mu * std::cos(t)) - k * t); }, 0.0, 2.0 * pi);
  return cplx(re, im) / (2.0 * pi);
}

double max_abs_diff(const ComplexGrid& a, const ComplexGrid& b) { return (a - b).cwiseAbs().maxCoeff(); }

Field2D gaussian(const GridSpec& g, double waist, double x0 = 0.0, double y0 = 0.0) {
  Field2D e = blank(g);
  for (std::size_t j = 0; j < e.nx(); ++j) {
    for (std::size_t i = 0; i < e.ny(); ++i) {
      const double r2 = std::pow(e.x(j) - x0, 2) + std::pow(e.y(i) - y0, 2);
      e.samples(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = std::exp(-r2 / (waist * waist));
    }
  }
  return e;
}

// Bright arcs of |E|^2 along a fine circle at the ring radius: upward
// crossings of half the peak, robust to nearest-pixel steps.
int ring_maxima(const Field2D& e, double radius) {
  const int n = 4096;
  std::vector<double> v(n);
  for (int t = 0; t < n; ++t) {
    const double th = 2.0 * pi * t / n;
    const double x = radius * std::cos(th) / e.pitch_x + static_cast<double>(e.nx() / 2);
    const double y = radius * std::sin(th) / e.pitch_y + static_cast<double>(e.ny() / 2);
    // nearest pixel is enough: petals are hundreds of samples wide
    v[t] = std::norm(e.samples(static_cast<Eigen::Index>(std::lround(y)), static_cast<Eigen::Index>(std::lround(x))));
  }
  int count = 0;
  const double half = 0.5 * *std::max_element(v.begin(), v.end());
  for (int t = 0; t < n; ++t) {
    if (v[(t + n - 1) % n] < half && v[t] >= half) ++count;
  }
  return count;
}

}  // namespace

TEST_CASE("ring modes") {
  const auto m0 = make_oam_mode(0, kRing, kGrid);
  CHECK(m0.power() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(m0.samples.imag().cwiseAbs().maxCoeff() == 0.0);
  CHECK(m0.samples.real().minCoeff() >= 0.0);

  SUBCASE("azimuthal orthogonality") {
    std::vector<Field2D> modes;
    for (int l = -4; l <= 4; ++l) modes.push_back(make_oam_mode(l, kRing, kGrid, kHeNeWavelength, 4));
    for (std::size_t a = 0; a < modes.size(); ++a) {
      for (std::size_t b = 0; b < modes.size(); ++b) {
        const double ov = std::abs(inner(modes[a], modes[b]));
        if (a == b) CHECK(ov == doctest::Approx(1.0).epsilon(1e-12));
        else CHECK(ov <= 1e-10);
      }
    }
  }

  SUBCASE("superposition of +l and -l shows 2|l| maxima") {
    for (int l : {1, 2, 3, 5}) {
      Field2D s = make_oam_mode(l, kRing, kGrid);
      s.samples += make_oam_mode(-l, kRing, kGrid).samples;
      CHECK(ring_maxima(s, kRing.radius) == 2 * l);
    }
  }

  SUBCASE("undersampled phase and oversized rings are refused") {
    // 2 pi R / pitch is about 483 px, so l = 61 leaves fewer than 8 per cycle
    CHECK_NOTHROW(make_oam_mode(60, kRing, kGrid));
    CHECK_THROWS_AS(make_oam_mode(61, kRing, kGrid), SamplingError);
    CHECK_THROWS_AS(make_oam_mode(1, kRing, kGrid, kHeNeWavelength, 61), SamplingError);
    CHECK_THROWS_AS(make_oam_mode(1, Ring{0.45 * 256 * 8e-6, kRing.width}, kGrid), SamplingError);
    CHECK_THROWS_AS(make_oam_mode(1, Ring{-1.0, 1.0}, kGrid), DomainError);
  }
}

TEST_CASE("fourier lens") {
  const double f = 0.1;
  const auto e = make_oam_mode(3, kRing, kGrid);
  const auto far = fourier_lens(e, f);
  CHECK(far.power() / e.power() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(far.pitch_x == doctest::Approx(kHeNeWavelength * f / (256 * 8e-6)));

  SUBCASE("applying twice inverts the image") {
    // same pitch in both planes when f = n pitch^2 / wavelength
    const double f0 = 256 * 8e-6 * 8e-6 / kHeNeWavelength;
    Field2D shifted = gaussian(kGrid, 20 * 8e-6, 40 * 8e-6, -24 * 8e-6);
    shifted.samples /= std::sqrt(shifted.power());
    const auto twice = fourier_lens(fourier_lens(shifted, f0), f0);
    const auto mirrored = gaussian(kGrid, 20 * 8e-6, -40 * 8e-6, 24 * 8e-6);
    CHECK(twice.pitch_x == doctest::Approx(kGrid.pitch).epsilon(1e-14));
    const double peak = twice.samples.cwiseAbs().maxCoeff();
    // row 0 and column 0 map onto themselves; the gaussian tail there is 4e-9
    CHECK(max_abs_diff(twice.samples, mirrored.samples / std::sqrt(mirrored.power())) / peak < 1e-8);
    CHECK(max_abs_diff(inverse_fourier_lens(fourier_lens(e, f), f).samples, e.samples) < 1e-12);
  }

  SUBCASE("gaussian to gaussian with the reciprocal waist") {
    const double w = 12 * 8e-6;
    const Field2D g = gaussian(kGrid, w);
    const auto G = fourier_lens(g, f);
    // continuous transform: waist w' = wavelength f / (pi w), peak area-scaled
    const double w2 = kHeNeWavelength * f / (pi * w);
    const double peak = std::abs(G.samples(128, 128));
    double worst = 0.0;
    for (std::size_t j = 100; j < 156; ++j) {
      const double u = G.x(j);
      const double expect = peak * std::exp(-u * u / (w2 * w2));
      worst = std::max(worst, std::abs(std::abs(G.samples(128, static_cast<Eigen::Index>(j))) - expect));
    }
    CHECK(worst / peak < 1e-10);
    CHECK(std::abs(std::arg(G.samples(128, 128))) < 1e-12);
  }
}

TEST_CASE("fan-out grating") {
  FanoutConfig c;
  CHECK(fanout_grating_phase(0.25, c) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(fanout_grating_phase(0.0, c) == doctest::Approx(std::atan(2.0 * 1.32859)).epsilon(1e-15));
  CHECK(fanout_grating_phase(0.0, c) == doctest::Approx(1.2110).epsilon(1e-4));
  CHECK(fanout_grating_phase(0.3, c) == fanout_grating_phase(-0.3, c));

  SUBCASE("coefficients against quadrature") {
    for (double mu : {0.7, 1.32859, 2.1}) {
      c.mu = mu;
      const auto coeffs = fanout_order_coefficients(c, 5);
      for (int k = -5; k <= 5; ++k) CHECK(std::abs(coeffs.at(k) - quadrature_order(mu, k)) < 1e-12);
    }
  }

  SUBCASE("three equal orders at the balanced mu") {
    c.mu = 1.32859;
    const auto coeffs = fanout_order_coefficients(c);
    const double a = std::abs(coeffs.at(-1)), b = std::abs(coeffs.at(0)), d = std::abs(coeffs.at(1));
    CHECK(std::abs(a / b - 1.0) < 1e-3);
    CHECK(std::abs(d / b - 1.0) < 1e-3);
    CHECK(fanout_imbalance(1.32859) < 1e-3);
    const double eff = fanout_efficiency(c);
    CHECK(eff == doctest::Approx(std::norm(quadrature_order(1.32859, -1)) + std::norm(quadrature_order(1.32859, 0)) +
                                 std::norm(quadrature_order(1.32859, 1)))
                     .epsilon(1e-12));
    CHECK(eff < 1.0);
  }

  SUBCASE("balance point by an independent root search") {
    auto diff = [](double mu) { return std::abs(quadrature_order(mu, 0)) - std::abs(quadrature_order(mu, 1)); };
    boost::math::tools::eps_tolerance<double> tol(40);
    std::uintmax_t it = 200;
    const auto [lo, hi] = boost::math::tools::bisect(diff, 1.2, 1.45, tol, it);
    const double root = 0.5 * (lo + hi);
    CHECK(balance_mu() == doctest::Approx(root).epsilon(1e-10));
    CHECK(kBalancedMu == doctest::Approx(root).epsilon(1e-10));

    const auto scan = scan_mu(1.2, 1.45, 251);
    CHECK(std::abs(scan.best_mu - 1.32859) <= 1e-3);
    CHECK(scan.best_imbalance < 1e-6);
    CHECK(scan.mu.size() == 251);
  }

  SUBCASE("correction phases") {
    c.mu = kBalancedMu;
    const auto ph = fanout_phase_correction(c);
    REQUIRE(ph.size() == 3);
    CHECK(ph.at(-1) == doctest::Approx(ph.at(1)).epsilon(1e-14));
    const auto coeffs = fanout_order_coefficients(c);
    std::vector<cplx> fixed;
    for (int k = -1; k <= 1; ++k) fixed.push_back(coeffs.at(k) * std::polar(1.0, -ph.at(k)));
    for (const auto& z : fixed) {
      CHECK(std::abs(std::arg(z)) <= 1e-3);
      CHECK(std::abs(std::abs(z) / std::abs(fixed[1]) - 1.0) <= 1e-3);
    }
  }

  CHECK_THROWS_AS(validate(FanoutConfig{-1.0, 3, 1.0}), DomainError);
  CHECK_THROWS_AS(validate(FanoutConfig{1.0, 2, 1.0}), DomainError);
  CHECK_THROWS_AS(validate(FanoutConfig{1.0, 3, 0.0}), DomainError);
}

TEST_CASE("log-polar sorter") {
  const auto s = default_sorter(kGrid, kRing, 80);
  CHECK(s.b == kRing.radius);
  CHECK(2.0 * pi * s.a == doctest::Approx(80 * kGrid.pitch).epsilon(1e-12));
  CHECK(sorter_phase1(s.b, 0.0, s) ==
        doctest::Approx(2.0 * pi * s.a * s.b / (s.wavelength * s.f)).epsilon(1e-14));
  CHECK(std::isfinite(sorter_phase1(0.0, 0.0, s)));

  const auto e = make_oam_mode(2, kRing, kGrid);
  SUBCASE("masks are phase only") {
    const auto m1 = apply_sorter_mask1(e, s);
    const auto m2 = apply_sorter_mask2(e, s);
    const double peak = e.samples.cwiseAbs().maxCoeff();
    CHECK((m1.samples.cwiseAbs() - e.samples.cwiseAbs()).cwiseAbs().maxCoeff() / peak < 1e-14);
    CHECK((m2.samples.cwiseAbs() - e.samples.cwiseAbs()).cwiseAbs().maxCoeff() / peak < 1e-14);
  }

  SUBCASE("wrap undoes unwrap") {
    const auto back = sorter_wrap(sorter_unwrap(e, s), s);
    CHECK(max_abs_diff(back.samples, e.samples) < 1e-8);
    CHECK(back.pitch_x == doctest::Approx(kGrid.pitch).epsilon(1e-14));
  }
}

TEST_CASE("unwrapped strip phase") {
  const GridSpec g{512, 8e-6};
  const Ring ring{0.3 * 512 * 8e-6, 0.06 * 512 * 8e-6};
  const std::size_t strip = 160;
  const auto s = default_sorter(g, ring, strip);
  // slope of the unwrapped phase along v across the strip, power weighted
  auto slope = [&](int l) {
    const auto u = sorter_unwrap(make_oam_mode(l, ring, g), s);
    Eigen::Index row = 0, col = 0;
    u.samples.cwiseAbs2().maxCoeff(&row, &col);
    double sw = 0.0, sv = 0.0, sp = 0.0, svv = 0.0, svp = 0.0;
    const auto half = static_cast<Eigen::Index>(strip / 2);
    double prev = std::arg(u.samples(256 - half + 4, col));
    double unwrapped = prev;
    for (Eigen::Index i = 256 - half + 4; i < 256 + half - 4; ++i) {
      const double ph = std::arg(u.samples(i, col));
      double d = ph - prev;
      d -= 2.0 * pi * std::round(d / (2.0 * pi));
      unwrapped += d;
      prev = ph;
      const double w = std::norm(u.samples(i, col));
      const double v = u.y(static_cast<std::size_t>(i));
      sw += w;
      sv += w * v;
      sp += w * unwrapped;
      svv += w * v * v;
      svp += w * v * unwrapped;
    }
    return (sw * svp - sv * sp) / (sw * svv - sv * sv);
  };
  const double width = static_cast<double>(strip) * g.pitch;
  CHECK(std::abs(slope(0)) <= 1e-3 * 2.0 * pi / width);
  CHECK(slope(1) * width == doctest::Approx(2.0 * pi).epsilon(0.02));
  CHECK(slope(-2) * width == doctest::Approx(-4.0 * pi).epsilon(0.02));
}

TEST_CASE("sorted spot position is affine in l") {
  const GridSpec g{512, 8e-6};
  const Ring ring{0.3 * 512 * 8e-6, 0.06 * 512 * 8e-6};
  const auto s = default_sorter(g, ring, 160);
  std::vector<double> ls, ys;
  for (int l = -3; l <= 3; ++l) {
    const auto far = fourier_lens(sorter_unwrap(make_oam_mode(l, ring, g), s), s.f);
    double w = 0.0, y = 0.0;
    for (std::size_t i = 0; i < far.ny(); ++i) {
      const double row = far.samples.row(static_cast<Eigen::Index>(i)).cwiseAbs2().sum();
      w += row;
      y += row * far.y(i);
    }
    ls.push_back(l);
    ys.push_back(y / w);
  }
  const double n = static_cast<double>(ls.size());
  double sl = 0, sy = 0, sll = 0, sly = 0;
  for (std::size_t k = 0; k < ls.size(); ++k) {
    sl += ls[k];
    sy += ys[k];
    sll += ls[k] * ls[k];
    sly += ls[k] * ys[k];
  }
  const double slope = (n * sly - sl * sy) / (n * sll - sl * sl);
  const double icpt = (sy - slope * sl) / n;
  double ss_res = 0, ss_tot = 0, worst = 0;
  for (std::size_t k = 0; k < ls.size(); ++k) {
    const double r = ys[k] - (icpt + slope * ls[k]);
    ss_res += r * r;
    ss_tot += std::pow(ys[k] - sy / n, 2);
    worst = std::max(worst, std::abs(r));
  }
  CHECK(1.0 - ss_res / ss_tot >= 0.999);
  CHECK(worst <= 0.02 * std::abs(slope));
  // spacing of the sorted spots is wavelength f / (2 pi a)
  CHECK(std::abs(slope) == doctest::Approx(s.wavelength * s.f / (2.0 * pi * s.a)).epsilon(0.05));
}

TEST_CASE("OAM spectrum") {
  SUBCASE("eigenmode") {
    const auto e = make_oam_mode(2, kRing, kGrid);
    const auto az = oam_spectrum(e, 8, SpectrumMethod::azimuthal);
    CHECK(az.at(2) >= 0.999);
    CHECK(az.dominant() == 2);
    CHECK(az.total() <= 1.0 + 1e-9);
    const auto pr = oam_spectrum(e, 8, SpectrumMethod::projective, &kRing);
    CHECK(pr.at(2) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(pr.dominant() == az.dominant());
    for (double x : az.power) CHECK(x >= 0.0);
  }

  SUBCASE("symmetric superposition") {
    Field2D e = make_oam_mode(3, kRing, kGrid);
    e.samples = (e.samples + make_oam_mode(-3, kRing, kGrid).samples) / std::sqrt(2.0);
    const auto az = oam_spectrum(e, 8, SpectrumMethod::azimuthal);
    CHECK(az.at(3) == doctest::Approx(az.at(-3)).epsilon(0.01));
    CHECK(az.at(3) + az.at(-3) >= 0.999);
    const auto pr = oam_spectrum(e, 8, SpectrumMethod::projective, &kRing);
    CHECK(pr.at(3) == doctest::Approx(0.5).epsilon(1e-10));
  }

  SUBCASE("methods agree on the dominant l for off-design fields") {
    const Ring shifted{0.8 * kRing.radius, 1.3 * kRing.width};
    for (int l : {-5, -1, 0, 4}) {
      Field2D e = make_oam_mode(l, shifted, kGrid);
      e.samples += 0.4 * make_oam_mode(l + 2, kRing, kGrid).samples;
      e.samples /= std::sqrt(e.power());
      CHECK(oam_spectrum(e, 10, SpectrumMethod::azimuthal).dominant() ==
            oam_spectrum(e, 10, SpectrumMethod::projective, &kRing).dominant());
    }
  }

  SUBCASE("sampling limits") {
    const auto e = make_oam_mode(1, kRing, kGrid);
    CHECK_THROWS_AS(oam_spectrum(e, 300, SpectrumMethod::azimuthal), SamplingError);
    CHECK_THROWS_AS(oam_spectrum(e, 200, SpectrumMethod::azimuthal), SamplingError);
    CHECK_THROWS_AS(oam_spectrum(e, 3, SpectrumMethod::projective), DomainError);
  }
}

TEST_CASE("ring intensity") {
  Field2D e = make_oam_mode(2, kRing, kGrid);
  e.samples += make_oam_mode(-2, kRing, kGrid).samples;
  const auto ring = ring_intensity(e);
  CHECK(ring.radius == doctest::Approx(kRing.radius).epsilon(0.05));
  const double top = *std::max_element(ring.intensity.begin(), ring.intensity.end());
  const double bottom = *std::min_element(ring.intensity.begin(), ring.intensity.end());
  CHECK(bottom / top < 1e-3);
}
