#include <benchmark/benchmark.h>

#include <cmath>

#include "spide/coefficients.hpp"
#include "spide/noise.hpp"
#include "spide/norms.hpp"
#include "spide/propagator.hpp"
#include "spide/spectral_grid.hpp"
#include "spide/symbols.hpp"

namespace {

using namespace spide;

Field bump(const SpectralGrid& grid) {
  return Field::sample(grid, [](const Point& x) { return std::exp(-x[0] * x[0] - x[1] * x[1]); });
}

void BM_ForwardInverse(benchmark::State& state) {
  auto grid = make_grid(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)), 8.0);
  Field u = bump(grid);
  for (auto _ : state) benchmark::DoNotOptimize(inverse(forward(u)));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(grid.size()));
}
BENCHMARK(BM_ForwardInverse)->Args({1, 256})->Args({1, 4096})->Args({2, 64})->Args({2, 256});

// Symbol tables: the half-sphere preset exercises the angular quadrature.
void BM_GeneratorMultiplier(benchmark::State& state) {
  const char* presets[] = {"fractional-laplacian", "kim-form", "half-sphere-degenerate"};
  auto grid = make_grid(2, static_cast<int>(state.range(1)), 4.0);
  auto coeffs = make_preset(presets[state.range(0)], 1.5, 2);
  for (auto _ : state) benchmark::DoNotOptimize(generator_multiplier(grid, 0.0, coeffs));
  state.SetLabel(presets[state.range(0)]);
}
BENCHMARK(BM_GeneratorMultiplier)->Args({0, 64})->Args({1, 64})->Args({2, 64});

void BM_BesovNorm(benchmark::State& state) {
  auto grid = make_grid(1, static_cast<int>(state.range(0)), 8.0);
  Field u = bump(grid);
  for (auto _ : state) benchmark::DoNotOptimize(besov_norm(u, 0.5, 4.0));
}
BENCHMARK(BM_BesovNorm)->Arg(256)->Arg(4096);

void BM_SamplePath(benchmark::State& state) {
  auto mesh = uniform_mesh(1.0, 512);
  NoiseConfig nc;
  nc.stable = StableIntensity{1.5, 1, [](double, const Point&) { return 1.0; }, 1.0};
  nc.eps_cut = 1.0 / static_cast<double>(state.range(0));
  nc.wiener_modes = 1;
  std::uint64_t id = 0;
  for (auto _ : state) benchmark::DoNotOptimize(sample_path(nc, mesh, 7, id++));
}
BENCHMARK(BM_SamplePath)->Arg(10)->Arg(100);

// Full path solve with transport jumps, Wiener forcing and no recording.
void BM_SolvePath(benchmark::State& state) {
  auto grid = make_grid(1, static_cast<int>(state.range(0)), 8.0);
  auto coeffs = make_preset("kim-form", 1.5, 1);
  auto mesh = uniform_mesh(1.0, static_cast<int>(state.range(1)));
  SolverInputs in;
  in.u0 = bump(grid);
  in.h = [h = bump(grid)](double) { return std::vector<Field>{h}; };
  in.h_constant = true;
  SolverOptions opt;
  opt.record = false;
  MildSolver solver(grid, coeffs, mesh, in, opt);
  NoiseConfig nc;
  nc.stable = solver.jump_intensity();
  nc.eps_cut = opt.eps_cut;
  nc.wiener_modes = 1;
  auto path = sample_path(nc, mesh, 11, 0);
  for (auto _ : state) benchmark::DoNotOptimize(solver.solve(path));
  state.SetItemsProcessed(state.iterations() * state.range(1));
}
BENCHMARK(BM_SolvePath)->Args({16, 1000})->Args({256, 512});

}  // namespace

BENCHMARK_MAIN();
