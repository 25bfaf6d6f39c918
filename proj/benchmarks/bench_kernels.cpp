#include <benchmark/benchmark.h>

#include "lrq/control_tasks.hpp"
#include "lrq/linalg.hpp"
#include "lrq/rng.hpp"
#include "lrq/soft_impute.hpp"
#include "lrq/svp.hpp"
#include "lrq/value_iteration.hpp"

namespace {

lrq::DenseMatrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
    lrq::Rng rng(seed);
    lrq::DenseMatrix m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) m(i, j) = rng.uniform(-1.0, 1.0);
    return m;
}

void BM_Svd(benchmark::State& state) {
    const auto rows = static_cast<std::size_t>(state.range(0));
    const auto cols = static_cast<std::size_t>(state.range(1));
    const auto m = random_matrix(rows, cols, 1);
    for (auto _ : state) benchmark::DoNotOptimize(lrq::svd(m));
}
BENCHMARK(BM_Svd)->Args({32, 18})->Args({32, 100})->Args({400, 100})->Unit(benchmark::kMicrosecond);

void BM_Svt(benchmark::State& state) {
    const auto m = random_matrix(static_cast<std::size_t>(state.range(0)), static_cast<std::size_t>(state.range(1)), 2);
    for (auto _ : state) benchmark::DoNotOptimize(lrq::svt(m, 0.1));
}
BENCHMARK(BM_Svt)->Args({32, 100})->Args({400, 100})->Unit(benchmark::kMicrosecond);

void BM_SoftImpute(benchmark::State& state) {
    const auto rows = static_cast<std::size_t>(state.range(0));
    const auto cols = static_cast<std::size_t>(state.range(1));
    const double p = static_cast<double>(state.range(2)) / 100.0;
    lrq::Rng rng(3);
    const auto truth = random_matrix(rows, 2, 4);
    const auto right = random_matrix(2, cols, 5);
    lrq::ObservationSet obs(rows, cols);
    for (const auto& c : lrq::sample_nonempty_mask(rows, cols, p, rng)) {
        obs.push_unchecked(c.row, c.col, truth(c.row, 0) * right(0, c.col) + truth(c.row, 1) * right(1, c.col));
    }
    const lrq::SoftImputeConfig cfg;
    for (auto _ : state) benchmark::DoNotOptimize(lrq::soft_impute(obs, cfg));
}
BENCHMARK(BM_SoftImpute)->Args({32, 100, 90})->Args({400, 100, 20})->Unit(benchmark::kMillisecond);

void BM_ViStep(benchmark::State& state) {
    const auto side = static_cast<std::size_t>(state.range(0));
    const auto actions = static_cast<std::size_t>(state.range(1));
    const auto mdp = lrq::discretize(lrq::pendulum_task(), lrq::GridSpec{{side, side}, actions});
    const auto q = random_matrix(mdp.n_states(), mdp.n_actions(), 6);
    for (auto _ : state) benchmark::DoNotOptimize(lrq::vi_step(mdp, q));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(mdp.n_pairs()));
}
BENCHMARK(BM_ViStep)->Args({20, 100})->Args({50, 1000})->Unit(benchmark::kMillisecond);

void BM_Discretize(benchmark::State& state) {
    const auto side = static_cast<std::size_t>(state.range(0));
    const auto actions = static_cast<std::size_t>(state.range(1));
    const auto task = lrq::pendulum_task();
    for (auto _ : state) benchmark::DoNotOptimize(lrq::discretize(task, lrq::GridSpec{{side, side}, actions}));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(side * side * actions));
}
BENCHMARK(BM_Discretize)->Args({20, 100})->Args({50, 1000})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
