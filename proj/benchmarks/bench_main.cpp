#include <benchmark/benchmark.h>

#include "hotel/dynamics/grid.hpp"
#include "hotel/dynamics/propagate.hpp"
#include "hotel/dynamics/timeline.hpp"
#include "hotel/multiplier/multiplier.hpp"
#include "hotel/optics/spectrum.hpp"
#include "hotel/protocol/hotel.hpp"
#include "hotel/well/spectral.hpp"

using namespace hotel;

namespace {

// One time step at the reference grid: a sharp wall keeps the potential kick live.
void BM_StrangStep(benchmark::State& state) {
  const auto m = static_cast<std::size_t>(state.range(0));
  const auto g0 = dynamics::to_grid(well::random_state({2.0, 0.0}, 8, 16, 1), m);
  dynamics::PotentialTimeline tl;
  tl.add({1.0, {dynamics::MovingWall{2.0, 1.0, 3e4, 8.0 * 2.0 / (m + 1)}}, "wall"});
  dynamics::PropagatorSettings ps;
  ps.dt = 1e-5;
  ps.norm_tolerance = 1.0;
  dynamics::Propagator prop(2.0, m, ps);
  auto g = g0;
  double t = 0.0;
  for (auto _ : state) {
    prop.advance(g, tl, t, t + ps.dt);
    t += ps.dt;
    if (t > 0.9) t = 0.0;
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_StrangStep)->Arg(511)->Arg(2047)->Arg(8191);

void BM_IdealPipeline(benchmark::State& state) {
  protocol::ProtocolConfig cfg;
  cfg.p = static_cast<std::size_t>(state.range(0));
  cfg.N = 128;
  const protocol::ProtocolPlan plan(cfg);
  const auto s = well::random_state({1.0, 0.0}, 32, 128, 7);
  for (auto _ : state) benchmark::DoNotOptimize(plan.run(s));
}
BENCHMARK(BM_IdealPipeline)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

void BM_MultiplyOam(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const multiplier::OamMultiplier m(multiplier::default_multiplier(3, {n, 8e-6}));
  const auto& c = m.config();
  const auto e = optics::make_oam_mode(1, c.ring, c.grid);
  for (auto _ : state) benchmark::DoNotOptimize(m.multiply(e));
}
BENCHMARK(BM_MultiplyOam)->Arg(512)->Arg(1024)->Unit(benchmark::kMillisecond);

void BM_OamSpectrum(benchmark::State& state) {
  const optics::GridSpec g{1024, 8e-6};
  const optics::Ring ring{0.3 * 1024 * 8e-6, 0.06 * 1024 * 8e-6};
  const auto e = optics::make_oam_mode(3, ring, g);
  for (auto _ : state) benchmark::DoNotOptimize(optics::oam_spectrum(e, 15, optics::SpectrumMethod::azimuthal));
}
BENCHMARK(BM_OamSpectrum)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
