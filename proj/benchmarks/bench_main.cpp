/// @file bench_main.cpp
/// @brief Hot-path timings: analytic layer, radial solves, 2D field
///        operations. Run manually; not part of the ctest gate.

#include <benchmark/benchmark.h>

#include <cmath>
#include <complex>
#include <random>

#include "vortexlab/field2d.hpp"
#include "vortexlab/gpflow.hpp"
#include "vortexlab/mustar.hpp"
#include "vortexlab/radial.hpp"
#include "vortexlab/tf.hpp"

namespace {

using namespace vtx;

TfModel model_2x() {
  TfModel probe = build_tf_model({2.0, 1.0});
  return build_tf_model({2.0, 2.0 * omega_c1(probe)});
}

void BM_cost_profile(benchmark::State& state) {
  TfModel m = model_2x();
  for (auto _ : state) benchmark::DoNotOptimize(cost_profile(m, m.params.omega0, 1024));
}
BENCHMARK(BM_cost_profile);

void BM_mu_star(benchmark::State& state) {
  TfModel m = model_2x();
  for (auto _ : state) benchmark::DoNotOptimize(mu_star(m, m.params.omega0, 2048));
}
BENCHMARK(BM_mu_star);

void BM_solve_potential(benchmark::State& state) {
  TfModel m = model_2x();
  SupportRadii radii = support_radii(m, m.params.omega0);
  RadialMeasure mu = mu_star_measure(m, m.params.omega0, make_radial_grid(radii.r_star, 2048));
  for (auto _ : state) benchmark::DoNotOptimize(solve_potential(mu, m));
}
BENCHMARK(BM_solve_potential);

void BM_renorm_minimize(benchmark::State& state) {
  TfModel m = model_2x();
  SupportRadii radii = support_radii(m, m.params.omega0);
  for (auto _ : state)
    benchmark::DoNotOptimize(minimize(m, m.params.omega0, zero_measure(radii.r_star, 512)));
}
BENCHMARK(BM_renorm_minimize)->Unit(benchmark::kMillisecond);

void BM_radial_profile(benchmark::State& state) {
  TfModel m = model_2x();
  for (auto _ : state) benchmark::DoNotOptimize(solve_radial_profile(m, 0.1, 2048));
}
BENCHMARK(BM_radial_profile)->Unit(benchmark::kMillisecond);

void BM_weighted_poisson_129(benchmark::State& state) {
  TfModel m = model_2x();
  Grid2D grid = make_grid2d(129, 1.2, m);
  ScalarField2D f = make_masked_field(grid, 0.9);
  for (int j = 0; j < grid.n; ++j)
    for (int i = 0; i < grid.n; ++i) {
      double dx = grid.coord(i) - 0.25, dy = grid.coord(j);
      if (dx * dx + dy * dy <= 0.01) f.values[grid.idx(i, j)] = 31.8;
    }
  for (auto _ : state) benchmark::DoNotOptimize(solve_weighted_poisson(f, m, 0.9, 1e-9));
}
BENCHMARK(BM_weighted_poisson_129)->Unit(benchmark::kMillisecond);

GpState random_state(int n) {
  TfModel m = model_2x();
  GpState st;
  st.grid = make_grid2d(n, m.r_tf + 6.0 * std::pow(0.1, 2.0 / 3.0), m);
  st.eps = 0.1;
  st.omega0 = m.params.omega0;
  st.s = 2.0;
  st.psi.resize(st.grid.size());
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  for (auto& z : st.psi) z = {u(rng), u(rng)};
  return st;
}

void BM_gp_energy_129(benchmark::State& state) {
  TfModel m = model_2x();
  GpState st = random_state(129);
  for (auto _ : state) benchmark::DoNotOptimize(gp_energy(st, m));
}
BENCHMARK(BM_gp_energy_129);

void BM_gp_gradient_129(benchmark::State& state) {
  TfModel m = model_2x();
  GpState st = random_state(129);
  for (auto _ : state) benchmark::DoNotOptimize(gp_energy_gradient(st, m));
}
BENCHMARK(BM_gp_gradient_129);

}  // namespace

BENCHMARK_MAIN();
