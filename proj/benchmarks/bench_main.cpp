#include <benchmark/benchmark.h>

#include <random>

#include "cpspectra/perron.hpp"
#include "cpspectra/reference_maps.hpp"
#include "cpspectra/spectra.hpp"

using namespace cpspectra;

namespace {

std::vector<Matrix> random_tuple(int d, Index m, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n;
  std::vector<Matrix> out;
  for (int i = 0; i < d; ++i) {
    Matrix a(m, m);
    for (Index k = 0; k < a.size(); ++k) {
      a.data()[k] = Complex(n(rng), n(rng));
    }
    out.push_back(a);
  }
  return out;
}

void BM_OuterRadius(benchmark::State &state) {
  const auto tuple = random_tuple(3, state.range(0), 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(outer_radius(tuple));
  }
}
BENCHMARK(BM_OuterRadius)->Arg(2)->Arg(4)->Arg(8)->Arg(12);

void BM_JsrBrute(benchmark::State &state) {
  const auto pair = golden_pair();
  for (auto _ : state) {
    benchmark::DoNotOptimize(jsr_brute(pair, static_cast<int>(state.range(0))));
  }
}
BENCHMARK(BM_JsrBrute)->Arg(8)->Arg(12)->Arg(16);

void BM_JsrTensor(benchmark::State &state) {
  const auto pair = golden_pair();
  for (auto _ : state) {
    benchmark::DoNotOptimize(jsr_tensor_approx(pair, static_cast<int>(state.range(0))));
  }
}
BENCHMARK(BM_JsrTensor)->Arg(1)->Arg(2)->Arg(3);

void BM_MaximalPart(benchmark::State &state) {
  const CpMap tau(random_tuple(2, state.range(0), 2));
  const auto phi = LinearMapOnAlgebra::from_cp(tau);
  for (auto _ : state) {
    benchmark::DoNotOptimize(maximal_part(phi));
  }
}
BENCHMARK(BM_MaximalPart)->Arg(2)->Arg(3)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_AlgebraBasis(benchmark::State &state) {
  const auto tuple = random_tuple(2, state.range(0), 3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(algebra_basis(tuple, true));
  }
}
BENCHMARK(BM_AlgebraBasis)->Arg(2)->Arg(4)->Arg(6)->Unit(benchmark::kMillisecond);

void BM_IrreducibleFibonacci(benchmark::State &state) {
  const CpMap tau = fibonacci_map();
  for (auto _ : state) {
    benchmark::DoNotOptimize(irreducible_cp(tau));
  }
}
BENCHMARK(BM_IrreducibleFibonacci);

} // namespace
BENCHMARK_MAIN();
