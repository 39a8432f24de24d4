#include <benchmark/benchmark.h>

#include <random>

#include "hafsim/gaussian.hpp"
#include "hafsim/oracle.hpp"
#include "hafsim/symplectic.hpp"
#include "support/test_helpers.hpp"

namespace {

using namespace hafsim;

void BM_solve_bdg(benchmark::State& state) {
    std::mt19937_64 rng(2);
    const int M = static_cast<int>(state.range(0));
    const auto H = testing::random_stable_hamiltonian(ModeLayout(M / 2, M - M / 2), rng);
    for (auto _ : state) {
        benchmark::DoNotOptimize(solve_bdg(H));
    }
}
BENCHMARK(BM_solve_bdg)->RangeMultiplier(2)->Range(2, 32)->Unit(benchmark::kMicrosecond);

void BM_bloch_messiah(benchmark::State& state) {
    std::mt19937_64 rng(3);
    const auto R = testing::random_symplectic(static_cast<int>(state.range(0)), rng);
    for (auto _ : state) {
        benchmark::DoNotOptimize(bloch_messiah(R));
    }
}
BENCHMARK(BM_bloch_messiah)->RangeMultiplier(2)->Range(2, 16)->Unit(benchmark::kMicrosecond);

void BM_covariance_from_quasiparticles(benchmark::State& state) {
    std::mt19937_64 rng(4);
    const int M = static_cast<int>(state.range(0));
    const ModeLayout layout(M / 2, M - M / 2);
    const auto H = testing::random_stable_hamiltonian(layout, rng);
    const auto R = solve_bdg(H);
    for (auto _ : state) {
        benchmark::DoNotOptimize(covariance_from_quasiparticles(R, layout, 0.5));
    }
}
BENCHMARK(BM_covariance_from_quasiparticles)
    ->RangeMultiplier(2)
    ->Range(2, 32)
    ->Unit(benchmark::kMicrosecond);

void BM_characteristic_function(benchmark::State& state) {
    const auto H = build_toy_hamiltonian(testing::figure_point(0.6));
    const auto G = covariance_from_quasiparticles(solve_bdg(H), H.layout, 0.4);
    Vector z(2);
    z << Complex(0.3, 0.2), Complex(-0.1, 0.4);
    for (auto _ : state) {
        benchmark::DoNotOptimize(characteristic_function(G, z));
    }
}
BENCHMARK(BM_characteristic_function)->Unit(benchmark::kMicrosecond);

void BM_fock_density_matrix(benchmark::State& state) {
    const auto H = build_toy_hamiltonian(testing::figure_point(0.5));
    const FockTruncation trunc{static_cast<int>(state.range(0))};
    for (auto _ : state) {
        benchmark::DoNotOptimize(fock_density_matrix(H, 0.3, trunc));
    }
}
BENCHMARK(BM_fock_density_matrix)->DenseRange(6, 14, 4)->Unit(benchmark::kMillisecond);

} // namespace
