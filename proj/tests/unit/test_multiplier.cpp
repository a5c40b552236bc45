#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "hotel/error.hpp"
#include "hotel/multiplier/multiplier.hpp"
#include "oracles.hpp"

using namespace hotel;
using namespace hotel::multiplier;
using optics::SpectrumMethod;
using std::numbers::pi;

namespace {

// Leakage figures need the 1024 grid; at 512 the seams of the tiled copies
// dominate and the |l| = 3 rows leak about a quarter of the target power.
const OamMultiplier& reference() {
  static const OamMultiplier m(default_multiplier(3, {1024, 8e-6}));
  return m;
}

Field2D mode(int l, int l_max = 15) {
  const auto& c = reference().config();
  return optics::make_oam_mode(l, c.ring, c.grid, c.sorter.wavelength, l_max);
}

const CrosstalkMatrix& matrix() {
  static const CrosstalkMatrix x = crosstalk_matrix(reference(), {-3, -2, -1, 0, 1, 2, 3}, 15);
  return x;
}

cplx quadrature_order(double mu, int k) {
  const double re = oracle::integrate(
      [&](double t) { return std::cos(std::atan(2.0 * mu * std::cos(t)) - k * t); }, 0.0, 2.0 * pi);
  const double im = oracle::integrate(
      [&](double t) { return std::sin(std::atan(2.0 * mu * std::cos(t)) - k * t); }, 0.0, 2.0 * pi);
  return cplx(re, im) / (2.0 * pi);
}

optics::RingProfile synthetic_ring(const std::vector<std::pair<int, double>>& harmonics) {
  optics::RingProfile r;
  r.radius = 1.0;
  const int n = 512;
  for (int t = 0; t < n; ++t) {
    const double th = 2.0 * pi * t / n;
    double v = 3.0;
    for (const auto& [h, a] : harmonics) v += a * std::cos(h * th);
    r.theta.push_back(th);
    r.intensity.push_back(v);
  }
  return r;
}

}  // namespace

TEST_CASE("configuration") {
  const auto c = default_multiplier(3, {1024, 8e-6});
  CHECK(c.fanout.copies == 3);
  CHECK(c.strip_pixels == 320);
  CHECK(c.fanout.mu == optics::kBalancedMu);
  CHECK(2.0 * pi * c.sorter.a == doctest::Approx(320 * 8e-6).epsilon(1e-12));

  auto bad = c;
  bad.fanout.copies = 5;
  CHECK_THROWS_AS(validate(bad), DomainError);
  bad = c;
  bad.fanout.period *= 1.01;
  CHECK_THROWS_AS(validate(bad), DomainError);
  bad = c;
  bad.strip_pixels = 400;
  CHECK_THROWS_AS(validate(bad), DomainError);
  CHECK_THROWS_AS(default_multiplier(2), DomainError);

  const auto a = design_annulus(c);
  CHECK(a.inner == doctest::Approx(c.ring.radius - 2.0 * c.ring.width));
  CHECK(a.outer == doctest::Approx(c.ring.radius + 2.0 * c.ring.width));
}

TEST_CASE("eigenmodes map to p l") {
  const auto& x = matrix();
  for (int l = -3; l <= 3; ++l) {
    int best = -15;
    double row_sum = 0.0;
    for (int o = -15; o <= 15; ++o) {
      const double v = x.at(l, o);
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
      row_sum += v;
      if (v > x.at(l, best)) best = o;
    }
    CAPTURE(l);
    CHECK(best == 3 * l);
    CHECK(row_sum <= 1.0 + 1e-9);

    // far leakage, summed over every |dl| >= 3 bin
    double far = 0.0;
    for (int o = -15; o <= 15; ++o) {
      if (std::abs(o - 3 * l) >= 3) far += x.at(l, o);
    }
    CHECK(far <= 0.1 * x.at(l, 3 * l));
  }
}

TEST_CASE("projective spectra agree on the mapping") {
  for (int l : {-2, 1, 3}) {
    CAPTURE(l);
    const auto out = reference().multiply(mode(l)).field;
    const auto& c = reference().config();
    const auto pr = optics::oam_spectrum(out, 15, SpectrumMethod::projective, &c.ring);
    CHECK(pr.dominant() == 3 * l);
  }
}

TEST_CASE("zero input row is symmetric") {
  const auto& x = matrix();
  const double dom = x.at(0, 0);
  for (int o = 1; o <= 15; ++o) CHECK(std::abs(x.at(0, o) - x.at(0, -o)) <= 0.02 * dom);
}

TEST_CASE("budget accounts for the off-target power") {
  const auto& b = matrix().budget;
  const auto& c = reference().config();
  double eff = 0.0;
  for (int k = -1; k <= 1; ++k) eff += std::norm(quadrature_order(c.fanout.mu, k));
  CHECK(b.fanout_loss == doctest::Approx(1.0 - eff).epsilon(1e-9));
  CHECK(b.sorter_leakage >= 0.0);
  CHECK(b.sorter_leakage < 1e-3);
  CHECK(b.seam >= 0.0);
}

TEST_CASE("linearity") {
  const auto& m = reference();
  const cplx a{0.6, -0.3};
  const cplx b{-0.2, 0.7};
  Field2D mix = mode(1);
  mix.samples = a * mode(1).samples + b * mode(-2).samples;
  const auto lhs = m.multiply(mix).field;
  const auto r1 = m.multiply(mode(1)).field;
  const auto r2 = m.multiply(mode(-2)).field;
  const optics::ComplexGrid rhs = a * r1.samples + b * r2.samples;
  const double scale = rhs.cwiseAbs().maxCoeff();
  CHECK((lhs.samples - rhs).cwiseAbs().maxCoeff() / scale <= 1e-10);
}

TEST_CASE("outputs of opposite modes stay orthogonal") {
  const auto& m = reference();
  const auto up = m.multiply(mode(3)).field;
  const auto down = m.multiply(mode(-3)).field;
  const double ov = std::norm(optics::inner(up, down)) / (up.power() * down.power());
  CHECK(ov <= 1e-2);
}

TEST_CASE("superposition of +-3 peaks at +-9") {
  const auto& m = reference();
  Field2D in = mode(3);
  in.samples = (mode(3).samples + mode(-3).samples) / std::sqrt(2.0);
  const auto s = optics::oam_spectrum(m.multiply(in).field, 15, SpectrumMethod::azimuthal);
  for (int o = -15; o <= 15; ++o) {
    if (std::abs(o) != 9) {
      CHECK(s.at(o) < s.at(9));
      CHECK(s.at(o) < s.at(-9));
    }
  }
  CHECK(s.at(9) == doctest::Approx(s.at(-9)).epsilon(0.02));
}

TEST_CASE("petals") {
  for (int l = 1; l <= 3; ++l) {
    CAPTURE(l);
    const auto r = petal_test(l, reference());
    CHECK(r.petals_in == 2 * l);
    CHECK(r.petals_out == 6 * l);
    CHECK(r.visibility_out >= 0.9);
    CHECK(r.visibility_in >= 0.99);
  }
  CHECK_THROWS_AS(petal_test(0, reference()), DomainError);
}

TEST_CASE("petal counting") {
  CHECK(count_petals(synthetic_ring({{6, 1.0}})) == 6);
  CHECK(count_petals(synthetic_ring({{6, 1.0}, {12, 0.5}, {1, 0.2}})) == 6);
  CHECK_THROWS_AS(count_petals(synthetic_ring({{2, 1.0}, {3, 0.97}})), AmbiguousHarmonicError);
  CHECK_NOTHROW(count_petals(synthetic_ring({{2, 1.0}, {3, 0.9}})));
  CHECK(visibility(synthetic_ring({{4, 1.5}})) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("copy phases are equalized") {
  // a narrow spot on the strip axis; its copies sit one strip apart
  auto run = [](bool corrected) {
    auto c = reference().config();
    c.phase_correction = corrected;
    const OamMultiplier m(c);
    Field2D spot = optics::blank(c.grid);
    const auto half = static_cast<Eigen::Index>(c.grid.n / 2);
    for (Eigen::Index i = half - 12; i <= half + 12; ++i) {
      for (Eigen::Index j = half - 12; j <= half + 12; ++j) {
        const double r2 = static_cast<double>((i - half) * (i - half) + (j - half) * (j - half));
        spot.samples(i, j) = std::exp(-r2 / 9.0);
      }
    }
    const auto copies = m.fan_out(spot);
    const auto step = static_cast<Eigen::Index>(c.strip_pixels);
    std::vector<cplx> at;
    for (int k = -1; k <= 1; ++k) at.push_back(copies.samples(half + k * step, half));
    return at;
  };
  const auto& c = reference().config();
  const auto raw = run(false);
  const auto fixed = run(true);
  const double expect = std::arg(quadrature_order(c.fanout.mu, 1) / quadrature_order(c.fanout.mu, 0));
  CHECK(std::abs(std::arg(raw[2] / raw[1]) - expect) < 1e-6);
  CHECK(std::abs(std::arg(raw[0] / raw[1]) - expect) < 1e-6);
  CHECK(std::abs(expect) > 0.1);
  CHECK(std::abs(std::arg(fixed[2] / fixed[1])) < 1e-6);
  CHECK(std::abs(std::arg(fixed[0] / fixed[1])) < 1e-6);
  CHECK(std::abs(fixed[0]) == doctest::Approx(std::abs(fixed[1])).epsilon(1e-3));
  CHECK(std::abs(fixed[2]) == doctest::Approx(std::abs(fixed[1])).epsilon(1e-3));
}

TEST_CASE("off-annulus input is flagged") {
  const auto& m = reference();
  CHECK(m.multiply(mode(1)).warnings.empty());
  const auto& c = m.config();
  const optics::Ring small{0.4 * c.ring.radius, 0.5 * c.ring.width};
  const auto r = m.multiply(optics::make_oam_mode(1, small, c.grid));
  CHECK(r.outside_fraction > 0.9);
  REQUIRE(r.warnings.size() == 1);
  CHECK(r.warnings[0].find("annulus") != std::string::npos);

  const auto wrong = optics::make_oam_mode(1, c.ring, {1024, 9e-6});
  CHECK_THROWS_AS(m.multiply(wrong), GeometryMismatch);
}
