#include <benchmark/benchmark.h>

#include <complex>
#include <numbers>
#include <random>

#include "qeilab/bounds.hpp"
#include "qeilab/construct.hpp"
#include "qeilab/field.hpp"
#include "qeilab/kernels.hpp"

using namespace qeilab;

namespace {

constexpr double kL = 2 * std::numbers::pi;

grid::TestFunction plateau(const grid::SpacetimeGrid& g) {
  return grid::plateau(g, {-1.25, 1.25, 0, 0, true}, {-1.9, 1.9, 0, 0, true});
}

void BM_SchurProduct(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::mt19937_64 rng(1);
  std::normal_distribution<double> z;
  Eigen::MatrixXcd B(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) B(i, j) = {z(rng), z(rng)};
  const auto a = kernels::with_weights(kernels::rvec::Ones(n), B * B.adjoint());
  for (auto _ : state) {
    const auto w = kernels::positivity_check(kernels::schur_product(a, a));
    benchmark::DoNotOptimize(w.min_eigenvalue);
  }
}
BENCHMARK(BM_SchurProduct)->Arg(16)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_Cprime(benchmark::State& state) {
  const int s = static_cast<int>(state.range(0));
  const auto g = grid::make_grid(kL, 2, 304 * s, 128 * s);
  const auto F = plateau(g);
  const auto f = grid::bump(g, {0, 0, 1.2, 1.0, false, true});
  const auto atlas = construct::build_atlas_cylinder(g, F.support);
  for (auto _ : state)
    benchmark::DoNotOptimize(construct::bound_constant_Cprime(f, F, atlas, 3).value);
}
BENCHMARK(BM_Cprime)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

void BM_ReferenceKernels(benchmark::State& state) {
  const int s = static_cast<int>(state.range(0));
  const auto g = grid::make_grid(kL, 2, 304 * s, 128 * s);
  const auto F = plateau(g);
  const auto b = field::make_basis(1.0, kL, 56 * s);
  for (auto _ : state) benchmark::DoNotOptimize(bounds::reference_kernels(F, b, 3).c0);
}
BENCHMARK(BM_ReferenceKernels)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

void BM_StressExpectation(benchmark::State& state) {
  const auto g = grid::make_grid(kL, 2, 304, 128);
  const auto F = plateau(g);
  const auto b = field::make_basis(1.0, kL, 56);
  const field::StateSpec s = field::Thermal{1.0};
  for (auto _ : state) benchmark::DoNotOptimize(field::stress_expectation(s, b, F));
}
BENCHMARK(BM_StressExpectation)->Unit(benchmark::kMillisecond);

void BM_MorreyBound(benchmark::State& state) {
  const auto g = grid::make_grid(kL, 2, 304, 128);
  const auto b = field::make_basis(1.0, kL, 56);
  const auto r = bounds::make_regions(0, 0, 0.5, g);
  const auto phi = field::make_solution(b, {{1, {2.0, 0.5}}, {-3, {1.0, -1.0}}, {7, {0.3, 0.0}}});
  for (auto _ : state) benchmark::DoNotOptimize(bounds::morrey_bound(phi, r).ratio);
}
BENCHMARK(BM_MorreyBound)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
