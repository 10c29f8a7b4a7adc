#include <benchmark/benchmark.h>

#include <cmath>
#include <random>
#include <vector>

#include "rabi/atlas.hpp"
#include "rabi/detail/jacobi.hpp"
#include "rabi/fock.hpp"
#include "rabi/recurrence.hpp"
#include "rabi/spectrum.hpp"

namespace {

void BM_HillDeterminant(benchmark::State& state) {
  const rabi::ModelParams p{static_cast<double>(state.range(0)) / 10.0, 0.4};
  for (auto _ : state) benchmark::DoNotOptimize(rabi::hill_determinant({0.37}, p).value);
}
BENCHMARK(BM_HillDeterminant)->Arg(3)->Arg(7)->Arg(12);

void BM_TailLimit(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(rabi::tail_limit(n, {0.5, 1.3}).value);
}
BENCHMARK(BM_TailLimit)->Arg(0)->Arg(3)->Arg(6);

void BM_FiniteDeterminant(benchmark::State& state) {
  const auto hi = static_cast<std::ptrdiff_t>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(rabi::finite_determinant(0, hi, {0.37}, {0.7, 0.4}));
}
BENCHMARK(BM_FiniteDeterminant)->Arg(12)->Arg(60);

void BM_Jacobi(benchmark::State& state) {
  const auto dim = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(1);
  std::normal_distribution<double> nd;
  std::vector<double> a(dim * dim);
  for (std::size_t r = 0; r < dim; ++r)
    for (std::size_t c = r; c < dim; ++c) a[r * dim + c] = a[c * dim + r] = nd(rng);
  for (auto _ : state) benchmark::DoNotOptimize(rabi::detail::jacobi_eigensystem(a, dim, 1e-13, false));
}
BENCHMARK(BM_Jacobi)->Arg(50)->Arg(162)->Unit(benchmark::kMillisecond);

void BM_ScanRegular(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(rabi::scan_regular({0.7, 0.4}, -1.0, 6.0, 0.01));
}
BENCHMARK(BM_ScanRegular)->Unit(benchmark::kMillisecond);

void BM_TailZeroSet(benchmark::State& state) {
  rabi::GridRegion r;
  r.g_max = 1.0;
  r.delta_min = -4.0;
  r.delta_max = 4.0;
  r.nx = r.ny = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    const auto field = rabi::sample_field(1, r, rabi::FieldKind::Tail);
    benchmark::DoNotOptimize(rabi::extract_zero_set(field).polylines.size());
  }
}
BENCHMARK(BM_TailZeroSet)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
