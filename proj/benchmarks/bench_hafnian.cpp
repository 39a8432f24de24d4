#include <benchmark/benchmark.h>

#include <random>

#include "hafsim/hafnian.hpp"
#include "support/test_helpers.hpp"

namespace {

using namespace hafsim;

void BM_hafnian_matching(benchmark::State& state) {
    std::mt19937_64 rng(1);
    const Matrix m = testing::random_symmetric_matrix(static_cast<int>(state.range(0)), rng);
    for (auto _ : state) {
        benchmark::DoNotOptimize(hafnian_matching(m));
    }
}
BENCHMARK(BM_hafnian_matching)->DenseRange(8, 16, 2)->Unit(benchmark::kMicrosecond);

void BM_hafnian_trace(benchmark::State& state) {
    std::mt19937_64 rng(1);
    const Matrix m = testing::random_symmetric_matrix(static_cast<int>(state.range(0)), rng);
    for (auto _ : state) {
        benchmark::DoNotOptimize(hafnian_trace(m));
    }
}
BENCHMARK(BM_hafnian_trace)->DenseRange(8, 24, 4)->Unit(benchmark::kMillisecond);

void BM_pattern_probability(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    CovarianceMatrix G;
    G.layout = ModeLayout(1, 0);
    G.normal = Matrix::Constant(1, 1, 0.7);
    G.anomalous = Matrix::Constant(1, 1, 0.5);
    for (auto _ : state) {
        benchmark::DoNotOptimize(pattern_probability(G, {n}));
    }
}
BENCHMARK(BM_pattern_probability)->DenseRange(2, 12, 2)->Unit(benchmark::kMicrosecond);

} // namespace
