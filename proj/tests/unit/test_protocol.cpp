#include <cmath>
#include <complex>
#include <numbers>

#include "doctest.h"
#include "hotel/error.hpp"
#include "hotel/protocol/hotel.hpp"

using namespace hotel;
using namespace hotel::well;
using namespace hotel::protocol;
using std::numbers::pi;

namespace {

const cplx I{0.0, 1.0};
const WellGeometry kUnit{1.0, 0.0};

SpectralState from_list(std::initializer_list<cplx> xs, WellGeometry g = kUnit) {
  Amplitudes a(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index k = 0;
  for (cplx x : xs) a[k++] = x;
  return {g, a};
}

// |<a|b>|^2 after padding both to the same length.
double padded_fidelity(const SpectralState& a, const SpectralState& b) {
  const Eigen::Index n = std::max(a.amps.size(), b.amps.size());
  Amplitudes x = Amplitudes::Zero(n), y = Amplitudes::Zero(n);
  x.head(a.amps.size()) = a.amps;
  y.head(b.amps.size()) = b.amps;
  return std::norm(x.dot(y));
}

SpectralState normalized(SpectralState s) {
  s.amps /= s.amps.norm();
  return s;
}

}  // namespace

TEST_CASE("hotel_shift") {
  const auto s = from_list({1.0, 0.0, 0.0});
  const auto up = hotel_shift(s, 1);
  REQUIRE(up.modes() == 4);
  CHECK(up.amps[0] == cplx(0.0));
  CHECK(up.amps[1] == cplx(1.0));

  const auto r = random_state(kUnit, 5, 8, 1);
  CHECK((hotel_shift(r, 0).amps - r.amps).cwiseAbs().maxCoeff() == 0.0);
  const auto r3 = hotel_shift(r, 3);
  CHECK(r3.norm_squared() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(r3.amps.head(3).cwiseAbs().maxCoeff() == 0.0);
  CHECK(r3.amp(4) == r.amp(1));

  CHECK(hotel_shift(r, 3, 8).modes() == 8);
  CHECK_THROWS_AS(hotel_shift(r, 4, 8), CapacityError);
}

TEST_CASE("multiplication oracle and its adjoint") {
  const cplx a{0.6, 0.1}, b{-0.3, 0.7};
  const auto s = from_list({a, b});
  const auto m = hotel_multiply_oracle(s, 2);
  REQUIRE(m.modes() == 4);
  CHECK(m.amp(2) == a);
  CHECK(m.amp(4) == b);
  CHECK(m.amp(1) == cplx(0.0));
  CHECK(m.amp(3) == cplx(0.0));

  const auto r = random_state(kUnit, 6, 6, 2);
  CHECK((hotel_multiply_oracle(r, 1).amps - r.amps).cwiseAbs().maxCoeff() == 0.0);

  const auto six = hotel_multiply_oracle(basis_state(kUnit, 2, 4), 3);
  CHECK(six.amp(6) == cplx(1.0));
  CHECK(six.norm_squared() == 1.0);

  CHECK_THROWS_AS(hotel_multiply_oracle(r, 3, 17), CapacityError);
  CHECK_NOTHROW(hotel_multiply_oracle(r, 3, 18));

  SUBCASE("isometry but not unitary") {
    for (std::size_t p : {2u, 3u, 4u}) {
      for (std::size_t n = 1; n <= 6; ++n) {
        const auto e = basis_state(kUnit, n, 6);
        const auto back = hotel_multiply_adjoint(hotel_multiply_oracle(e, p), p);
        CHECK((back.amps - e.amps).cwiseAbs().maxCoeff() == 0.0);
      }
      for (std::size_t n = 1; n <= 6 * p; ++n) {
        const auto e = basis_state(kUnit, n, 6 * p);
        const auto there = hotel_multiply_oracle(hotel_multiply_adjoint(e, p), p);
        CHECK(there.norm_squared() == (n % p == 0 ? 1.0 : 0.0));
      }
    }
  }
}

TEST_CASE("phase offset") {
  const double tau = revival_time(1.0);
  const double V = omega0(1.0) / 4.0;
  const auto s = random_state(kUnit, 12, 12, 3);
  const auto out = phase_offset(s, V, tau);
  CHECK((out.amps - (-I) * s.amps).cwiseAbs().maxCoeff() < 1e-13);

  const auto free_only = phase_offset(s, 0.0, 0.3);
  CHECK((free_only.amps - free_evolve(s, 0.3).amps).cwiseAbs().maxCoeff() == 0.0);

  // a half already carrying -i picks up another -i
  const auto twice = phase_offset(scaled(s, -I), V, tau);
  CHECK((twice.amps + s.amps).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("split and merge") {
  const WellGeometry big{2.0, 0.0};
  const double tau = revival_time(1.0);
  const std::size_t work = 16384;

  SUBCASE("copies of the ground state after the half-period evolution") {
    const auto e = free_evolve(rebase(basis_state(kUnit, 1, 1), big, work), tau);
    const auto [left, right] = split_at_node(e, 16);
    CHECK(left.geometry == kUnit);
    CHECK(right.geometry == (WellGeometry{1.0, 1.0}));
    // left = phase * h1 / sqrt(2), right = -i * phase * mirror(h1) / sqrt(2)
    const cplx lphase = left.amps[0] * std::sqrt(2.0);
    CHECK(std::abs(std::abs(lphase) - 1.0) < 1e-9);
    CHECK(std::abs(right.amps[0] * std::sqrt(2.0) - (-I) * lphase) < 1e-9);
    CHECK(left.amps.tail(15).cwiseAbs().maxCoeff() < 1e-9);
    CHECK(left.norm_squared() + right.norm_squared() == doctest::Approx(1.0).epsilon(1e-9));
  }

  SUBCASE("no node") {
    const auto s = rebase(basis_state(kUnit, 1, 1), big, 2048);
    CHECK_THROWS_AS(split_at_node(basis_state(big, 1, 4), 8), NodeError);
    try {
      split_at_node(basis_state(big, 1, 4), 8);
    } catch (const NodeError& err) {
      CHECK(err.position() == doctest::Approx(1.0));
      CHECK(err.relative_magnitude() > 0.5);
    }
    // h1 of the left half sits exactly on the boundary node
    CHECK_NOTHROW(split_at_node(s, 8, 1e-6));
  }

  SUBCASE("merge of antisymmetric copies is g2") {
    const auto left = scaled(basis_state(kUnit, 1, 8), 1.0 / std::sqrt(2.0));
    const auto right = scaled(mirror(basis_state({1.0, 1.0}, 1, 8)), -1.0 / std::sqrt(2.0));
    const auto m = merge_halves(left, right);
    CHECK(m.geometry == big);
    CHECK(std::abs(m.amp(2) - cplx(1.0)) < 1e-14);
    CHECK(std::abs(m.norm_squared() - 1.0) < 1e-14);
  }

  SUBCASE("zero halves") {
    const SpectralState z(kUnit, Amplitudes::Zero(4));
    const SpectralState zr({1.0, 1.0}, Amplitudes::Zero(4));
    const auto m = merge_halves(z, zr);
    CHECK(m.norm_squared() == 0.0);
    CHECK_FALSE(is_normalized(m));
  }

  SUBCASE("random halves keep their norm") {
    for (unsigned seed = 0; seed < 5; ++seed) {
      const auto l = scaled(random_state(kUnit, 8, 8, 10 + seed), std::sqrt(0.3));
      const auto r = scaled(random_state({1.0, 1.0}, 8, 8, 20 + seed), std::sqrt(0.7));
      // merged into exactly 2N modes the map is not complete; the tail is small
      const auto m = merge_halves(l, r, 4096);
      CHECK(std::abs(m.norm_squared() - 1.0) < 1e-6);
      const auto back = split_into(m, 2, 8, 1.0).pieces;
      CHECK((back[0].amps - l.amps).cwiseAbs().maxCoeff() < 1e-8);
      CHECK((back[1].amps - r.amps).cwiseAbs().maxCoeff() < 1e-8);
    }
  }

  SUBCASE("split then merge restores the evolved state") {
    const auto s = random_state(kUnit, 8, 8, 31);
    const auto e = free_evolve(rebase(s, big, work), tau);
    const auto [l, r] = split_at_node(e, 32);
    const auto m = merge_halves(l, r, 64);
    CHECK((m.amps - e.amps.head(64)).cwiseAbs().maxCoeff() < 1e-10);
  }

  const SpectralState odd(kUnit, Amplitudes::Ones(2));
  const SpectralState far({1.0, 5.0}, Amplitudes::Ones(2));
  CHECK_THROWS_AS(merge_halves(odd, far), GeometryMismatch);
}

TEST_CASE("adiabatic retag") {
  const WellGeometry big{2.0, 0.0};
  const auto g2 = basis_state(big, 2, 4);
  const auto r = adiabatic_retag(g2, 1.0, 0.0, true);
  CHECK(r.state.geometry == kUnit);
  CHECK(r.state.amp(2) == cplx(1.0));

  const double phi = 0.9;
  Amplitudes a = Amplitudes::Zero(4);
  a[1] = 1.0 / std::sqrt(2.0);
  a[3] = std::exp(I * phi) / std::sqrt(2.0);
  const auto corrected = adiabatic_retag({big, a}, 1.0, 25.0, true);
  CHECK(std::arg(corrected.state.amp(4) / corrected.state.amp(2)) == doctest::Approx(phi));

  SUBCASE("dynamical phases for a linear wall") {
    const double T = 3.0;
    const auto rt = adiabatic_retag({big, a}, 1.0, T, false);
    // -(1/hbar) integral of E_n over a width moving linearly from 2 to 1
    for (int n = 1; n <= 4; ++n) {
      const double expect = -pi * pi * n * n / 2.0 * T / (2.0 * 1.0);
      CHECK(rt.dynamical_phases[n - 1] == doctest::Approx(expect).epsilon(1e-14));
    }
    const cplx expect4 = a[3] * std::exp(I * rt.dynamical_phases[3]);
    CHECK(std::abs(rt.state.amp(4) - expect4) < 1e-12);
  }
  CHECK(compression_phase_integral(2.0, 2.0, 4.0) == doctest::Approx(1.0));
}

TEST_CASE("copy pattern") {
  SUBCASE("p = 2") {
    const auto pat = derive_copy_pattern(2, 1.0);
    CHECK(pat.split_time == doctest::Approx(revival_time(1.0)));
    CHECK(pat.orientation == std::vector<int>{1, -1});
    CHECK(pat.offsets[0] == 0.0);
    CHECK(pat.offsets[1] == doctest::Approx(pi / 2.0).epsilon(1e-9));
    CHECK(pat.potentials[1] == doctest::Approx(omega0(1.0) / 4.0).epsilon(1e-9));
    CHECK(pat.residual < 1e-8);
  }
  SUBCASE("odd p needs a full p periods") {
    const auto pat = derive_copy_pattern(3, 1.0);
    CHECK(pat.split_time_revivals == doctest::Approx(3.0));
    CHECK(pat.orientation == std::vector<int>{1, -1, 1});
    CHECK(pat.residual < 1e-8);
  }
  SUBCASE("p = 4") {
    const auto pat = derive_copy_pattern(4, 1.0);
    CHECK(pat.split_time_revivals == doctest::Approx(2.0));
    CHECK(pat.residual < 1e-8);
  }
  SUBCASE("scales with the well width and constants") {
    const PhysicalConstants c{0.5, 2.0};
    const auto pat = derive_copy_pattern(2, 1.7, c);
    CHECK(pat.split_time == doctest::Approx(revival_time(1.7, c)));
  }
}

TEST_CASE("ideal pipeline, p = 2") {
  ProtocolConfig cfg;
  cfg.N = 64;
  const ProtocolPlan plan(cfg);

  SUBCASE("ground state goes to level 2") {
    const auto res = plan.run(basis_state(kUnit, 1, 64));
    CHECK(fidelity(res.output, basis_state(kUnit, 2, 128)) >= 1.0 - 1e-10);
    CHECK(res.output.amp(2).real() > 0.0);
    CHECK(std::abs(res.output.amp(2).imag()) < 1e-12);
    REQUIRE(res.trace.steps.size() == 6);
    const char* labels[] = {"expand", "mirror-evolve", "split", "phase", "merge", "compress"};
    for (int k = 0; k < 6; ++k) CHECK(res.trace.steps[k].label == labels[k]);
    CHECK(res.trace.flags.empty());
    CHECK(res.trace.node_values.at(0) < 1e-10);
  }

  SUBCASE("two-level superposition keeps its relative phase") {
    const auto s = normalized(from_list({1.0, std::exp(I * 0.4)}));
    const auto res = run_ideal_protocol(s, cfg);
    CHECK(std::norm(res.output.amp(2)) == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(std::norm(res.output.amp(4)) == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(std::arg(res.output.amp(4) / res.output.amp(2)) == doctest::Approx(0.4).epsilon(1e-9));
    CHECK(padded_fidelity(res.output, hotel_multiply_oracle(s, 2)) >= 1.0 - 1e-10);
  }

  SUBCASE("random states") {
    for (unsigned seed = 0; seed < 10; ++seed) {
      const auto s = random_state(kUnit, 32, 64, 500 + seed);
      const auto res = plan.run(s);
      CHECK(padded_fidelity(res.output, hotel_multiply_oracle(s, 2)) >= 1.0 - 1e-8);
      CHECK(vacancy_leakage(res.output, 2) <= 1e-10);
      CHECK(std::abs(res.output.norm_squared() - 1.0) <= 1e-8);
      for (double v : res.trace.node_values) CHECK(v <= 1e-10);
    }
  }

  SUBCASE("global phase tie-break off leaves the copy phase") {
    ProtocolConfig raw = cfg;
    raw.correct_global_phase = false;
    const auto res = ProtocolPlan(raw).run(basis_state(kUnit, 1, 64));
    CHECK(std::abs(std::abs(res.output.amp(2)) - 1.0) < 1e-9);
  }

  SUBCASE("trace json") {
    const auto res = plan.run(basis_state(kUnit, 1, 4));
    const auto j = res.trace.to_json(4, false);
    CHECK(j.at("steps").size() == 6);
    CHECK(j.at("steps")[0].at("label") == "expand");
    CHECK_FALSE(j.at("steps")[0].contains("seconds"));
    CHECK(j.at("steps")[2].at("snapshot").size() == 2);
    CHECK(j.at("pattern").at("p") == 2);
  }

  SUBCASE("truncation is flagged") {
    ProtocolConfig tight = cfg;
    tight.N = 8;
    tight.work_modes = 64;
    tight.node_tol = 1.0;
    const auto res = ProtocolPlan(tight).run(basis_state(kUnit, 1, 8));
    CHECK(res.trace.norm_captured < 1.0 - 1e-8);
    CHECK_FALSE(res.trace.flags.empty());
  }

  SUBCASE("bad inputs") {
    CHECK_THROWS_AS(plan.run(basis_state({2.0, 0.0}, 1, 4)), GeometryMismatch);
    CHECK_THROWS_AS(plan.run(basis_state(kUnit, 1, 65)), CapacityError);
    ProtocolConfig p3 = cfg;
    p3.p = 3;
    CHECK_THROWS_AS(run_ideal_protocol(basis_state(kUnit, 1, 4), p3), DomainError);
    ProtocolConfig p1 = cfg;
    p1.p = 1;
    CHECK_THROWS_AS(validate(p1), DomainError);
  }
}

TEST_CASE("ideal pipeline, general p") {
  SUBCASE("p = 2 agrees with the two-well pipeline") {
    ProtocolConfig cfg;
    cfg.N = 16;
    const auto s = random_state(kUnit, 8, 16, 8);
    const auto a = run_ideal_protocol(s, cfg).output;
    const auto b = run_ideal_protocol_p(s, cfg).output;
    CHECK((a.amps - b.amps).cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("p = 3 examples") {
    ProtocolConfig cfg;
    cfg.p = 3;
    cfg.N = 64;
    const ProtocolPlan plan(cfg);
    const auto g = plan.run(basis_state(kUnit, 1, 64));
    CHECK(fidelity(g.output, basis_state(kUnit, 3, 192)) >= 1.0 - 1e-8);

    const auto s = normalized(from_list({1.0, std::exp(I * -1.1)}));
    const auto res = plan.run(s);
    CHECK(std::norm(res.output.amp(3)) == doctest::Approx(0.5).epsilon(1e-8));
    CHECK(std::norm(res.output.amp(6)) == doctest::Approx(0.5).epsilon(1e-8));
    CHECK(std::arg(res.output.amp(6) / res.output.amp(3)) == doctest::Approx(-1.1).epsilon(1e-8));
    CHECK(res.trace.pattern.residual < 1e-8);
  }
  SUBCASE("oracle equivalence on random states") {
    for (std::size_t p : {2u, 3u, 4u}) {
      ProtocolConfig cfg;
      cfg.p = p;
      cfg.N = 32;
      const ProtocolPlan plan(cfg);
      for (unsigned seed = 0; seed < 100; ++seed) {
        const auto s = random_state(kUnit, 32, 32, 1000 * p + seed);
        const auto res = plan.run(s);
        const double f = padded_fidelity(res.output, hotel_multiply_oracle(s, p));
        CHECK(f >= 1.0 - 1e-8);
        CHECK(vacancy_leakage(res.output, p) <= 1e-10);
        CHECK(std::abs(res.output.norm_squared() - 1.0) <= 1e-8);
      }
    }
  }
}
