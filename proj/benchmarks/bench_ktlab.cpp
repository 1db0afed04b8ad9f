#include <benchmark/benchmark.h>

#include "ktlab/scalar.hpp"

using ktlab::ExactScalar;

static void BM_ScalarMul(benchmark::State& state) {
    const ExactScalar a = ktlab::scalar_parse("3/4 + 1/2*pi*i - 2*pi*pi");
    const ExactScalar b = ktlab::scalar_parse("1/4/pi + sqrt(2)*pi");
    for (auto _ : state) {
        benchmark::DoNotOptimize(a * b);
    }
}
BENCHMARK(BM_ScalarMul);

static void BM_ScalarParse(benchmark::State& state) {
    for (auto _ : state) {
        benchmark::DoNotOptimize(ktlab::scalar_parse("4*pi*pi - 4*pi + 3 - 1/2*i"));
    }
}
BENCHMARK(BM_ScalarParse);

BENCHMARK_MAIN();
