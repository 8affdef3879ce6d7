// Micro-benchmarks for the statistic building blocks. The location-based
// statistics should scale linearly in the sample size; the MMD baseline is
// quadratic by construction.
#include "relfit/fssd.hpp"
#include "relfit/kernel.hpp"
#include "relfit/mmd.hpp"
#include "relfit/models.hpp"
#include "relfit/rng.hpp"
#include "relfit/tuning.hpp"
#include "relfit/ume.hpp"

#include <benchmark/benchmark.h>

#include <cstdint>

namespace {

using namespace relfit;

constexpr Index kDim = 10;
constexpr Index kLocations = 5;

Matrix random_matrix(Index rows, Index cols, std::uint64_t seed) {
    Rng rng = make_rng(seed);
    Matrix m(rows, cols);
    fill_standard_normal(rng, m);
    return m;
}

void bm_ume_sq(benchmark::State& state) {
    const Index n = state.range(0);
    const Matrix y = random_matrix(n, kDim, 1);
    const Matrix z = random_matrix(n, kDim, 2);
    const Matrix v = random_matrix(kLocations, kDim, 3);
    const GaussianKernel k(2.0 * kDim);
    for (auto _ : state) benchmark::DoNotOptimize(ume_sq(k, v, y, z));
    state.SetComplexityN(n);
}

void bm_rel_ume_stat_and_var(benchmark::State& state) {
    const Index n = state.range(0);
    const Matrix x = random_matrix(n, kDim, 1);
    const Matrix y = random_matrix(n, kDim, 2);
    const Matrix z = random_matrix(n, kDim, 3);
    const Matrix v = random_matrix(kLocations, kDim, 4);
    const GaussianKernel k(2.0 * kDim);
    for (auto _ : state)
        benchmark::DoNotOptimize(rel_ume_stat_and_var(k, k, v, v, x, y, z));
    state.SetComplexityN(n);
}

void bm_fssd_sq(benchmark::State& state) {
    const Index n = state.range(0);
    const Matrix z = random_matrix(n, kDim, 1);
    const Matrix w = random_matrix(kLocations, kDim, 2);
    const IsotropicGaussian model(Vector::Zero(kDim), 1.0);
    const GaussianKernel k(2.0 * kDim);
    for (auto _ : state) benchmark::DoNotOptimize(fssd_sq(k, model, w, z));
    state.SetComplexityN(n);
}

void bm_rel_fssd_stat_and_var(benchmark::State& state) {
    const Index n = state.range(0);
    const Matrix z = random_matrix(n, kDim, 1);
    const Matrix w = random_matrix(kLocations, kDim, 2);
    Vector shifted = Vector::Zero(kDim);
    shifted(0) = 0.5;
    const IsotropicGaussian model_p(shifted, 1.0);
    const IsotropicGaussian model_q(Vector::Zero(kDim), 1.0);
    const GaussianKernel k(2.0 * kDim);
    for (auto _ : state)
        benchmark::DoNotOptimize(rel_fssd_stat_and_var(k, k, model_p, model_q, w, w, z));
    state.SetComplexityN(n);
}

void bm_mmd_u_sq(benchmark::State& state) {
    const Index n = state.range(0);
    const Matrix a = random_matrix(n, kDim, 1);
    const Matrix b = random_matrix(n, kDim, 2);
    const GaussianKernel k(2.0 * kDim);
    for (auto _ : state) benchmark::DoNotOptimize(mmd_u_sq(k, a, b));
    state.SetComplexityN(n);
}

void bm_rel_mmd_stat_and_var(benchmark::State& state) {
    const Index n = state.range(0);
    const Matrix x = random_matrix(n, kDim, 1);
    const Matrix y = random_matrix(n, kDim, 2);
    const Matrix z = random_matrix(n, kDim, 3);
    const GaussianKernel k(2.0 * kDim);
    for (auto _ : state) benchmark::DoNotOptimize(rel_mmd_stat_and_var(k, x, y, z));
    state.SetComplexityN(n);
}

void bm_median_heuristic_subsampled(benchmark::State& state) {
    const Index n = state.range(0);
    const Matrix z = random_matrix(n, kDim, 1);
    for (auto _ : state)
        benchmark::DoNotOptimize(median_heuristic_subsampled(z, 1000, 7));
    state.SetComplexityN(n);
}

void bm_ume_criterion_with_grad(benchmark::State& state) {
    const Index n = state.range(0);
    const Matrix x = random_matrix(n, kDim, 1);
    const Matrix y = random_matrix(n, kDim, 2);
    const Matrix z = random_matrix(n, kDim, 3);
    const Matrix v = random_matrix(kLocations, kDim, 4);
    for (auto _ : state)
        benchmark::DoNotOptimize(
            ume_criterion_with_grad(v, 2.0 * kDim, x, y, z, config::kDefaultGamma));
    state.SetComplexityN(n);
}

BENCHMARK(bm_ume_sq)->RangeMultiplier(2)->Range(1000, 8000)->Complexity(benchmark::oN);
BENCHMARK(bm_rel_ume_stat_and_var)
    ->RangeMultiplier(2)
    ->Range(1000, 8000)
    ->Complexity(benchmark::oN);
BENCHMARK(bm_fssd_sq)->RangeMultiplier(2)->Range(1000, 8000)->Complexity(benchmark::oN);
BENCHMARK(bm_rel_fssd_stat_and_var)
    ->RangeMultiplier(2)
    ->Range(1000, 8000)
    ->Complexity(benchmark::oN);
BENCHMARK(bm_mmd_u_sq)->RangeMultiplier(2)->Range(1000, 8000)->Complexity(benchmark::oNSquared);
BENCHMARK(bm_rel_mmd_stat_and_var)
    ->RangeMultiplier(2)
    ->Range(1000, 8000)
    ->Complexity(benchmark::oNSquared);
BENCHMARK(bm_median_heuristic_subsampled)
    ->RangeMultiplier(2)
    ->Range(1000, 8000)
    ->Complexity(benchmark::oN);
BENCHMARK(bm_ume_criterion_with_grad)
    ->RangeMultiplier(2)
    ->Range(1000, 8000)
    ->Complexity(benchmark::oN);

}  // namespace

BENCHMARK_MAIN();
