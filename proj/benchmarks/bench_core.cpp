#include <benchmark/benchmark.h>

#include "spt/dynamics.hpp"
#include "spt/effective.hpp"
#include "spt/montecarlo.hpp"

namespace {

spt::SystemParams params() {
  spt::SystemParams p;
  p.g1 = 0.05;
  p.omega = 2.0;
  p.kappa1 = 0.005;
  p.kappa2 = 1.0;
  return p;
}

// One Lindblad right-hand side evaluation, measured through a single fixed step.
void BM_LindbladStep(benchmark::State& state) {
  const spt::HilbertSpace space({1, static_cast<int>(state.range(0))});
  const spt::SystemParams p = params();
  spt::LindbladOptions opt;
  opt.ode.fixed_step = 1e-3;
  opt.check_positivity = false;
  const auto h = spt::hamiltonian_ideal(p, space);
  const auto cs = spt::collapse_set(p, {}, space);
  const auto rho0 = spt::DensityMatrix::pure(spt::basis_state(space, spt::Level::e, 0, 0));
  for (auto _ : state) benchmark::DoNotOptimize(spt::lindblad_propagate(h, cs, rho0, {0.0, 1e-3}, opt));
  state.SetLabel("dim " + std::to_string(space.dim()));
}
BENCHMARK(BM_LindbladStep)->Arg(4)->Arg(10)->Arg(16);

void BM_SettingRateInversion(benchmark::State& state) {
  const spt::SystemParams p = params();
  for (auto _ : state) benchmark::DoNotOptimize(spt::setting_rate(p, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_SettingRateInversion)->Arg(3)->Arg(10)->Arg(30);

void BM_DarkRatesSteady(benchmark::State& state) {
  spt::SystemParams p = params();
  p.g1 = 0.2;
  p.kappa2 = 0.1;
  p.anharmonicity = 50.0;
  for (auto _ : state) benchmark::DoNotOptimize(spt::dark_rates_steady(p));
}
BENCHMARK(BM_DarkRatesSteady);

void BM_SpectralSetup(benchmark::State& state) {
  const spt::HilbertSpace space({2, static_cast<int>(state.range(0))});
  const spt::SystemParams p = params();
  const auto h = spt::hamiltonian_ideal(p, space);
  const auto cs = spt::collapse_set(p, {}, space);
  for (auto _ : state) benchmark::DoNotOptimize(spt::TrajectorySimulator(h, cs).spectral());
}
BENCHMARK(BM_SpectralSetup)->Arg(10)->Arg(16);

void BM_GainTrajectory(benchmark::State& state) {
  const spt::HilbertSpace space({1, 10});
  spt::SystemParams p = params();
  p.g1 = 0.25;
  p.kappa1 = spt::setting_rate(p, 10).value;
  const spt::TrajectorySimulator sim(spt::hamiltonian_ideal(p, space), spt::collapse_set(p, {}, space));
  const auto e00 = spt::basis_state(space, spt::Level::e, 0, 0);
  std::uint64_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(sim.run(e00, 2000.0, 1, i++));
}
BENCHMARK(BM_GainTrajectory);

}  // namespace

BENCHMARK_MAIN();
