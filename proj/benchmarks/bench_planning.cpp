#include <benchmark/benchmark.h>

#include "idp/baselines.hpp"
#include "idp/solver_exact.hpp"
#include "idp/solver_seq.hpp"

namespace {

using namespace idp;

void BM_SolveExactFinite(benchmark::State& state) {
    const int n_actions = static_cast<int>(state.range(0));
    const int n_incentives = static_cast<int>(state.range(1));
    const IdpModel model = experiment_model(n_actions, n_incentives, 1.0);
    const JointPrior prior = uniform_monotone_prior(n_actions, n_incentives);
    for (auto _ : state) {
        auto solution = solve_finite(model, prior, 20);
        benchmark::DoNotOptimize(solution.root().value);
    }
}
BENCHMARK(BM_SolveExactFinite)
    ->ArgsProduct({{3}, {2, 3, 4, 5, 6, 7, 8}})
    ->ArgsProduct({{1, 2, 4, 5}, {4}});

void BM_SolveSeqFinite(benchmark::State& state) {
    const int n_actions = static_cast<int>(state.range(0));
    const int n_incentives = static_cast<int>(state.range(1));
    const IdpModel model = experiment_model(n_actions, n_incentives, 1.0);
    const JointPrior prior = uniform_monotone_prior(n_actions, n_incentives);
    for (auto _ : state) {
        auto solution = solve_seq_finite(model, prior, 20);
        benchmark::DoNotOptimize(solution.root().value);
    }
}
BENCHMARK(BM_SolveSeqFinite)
    ->ArgsProduct({{3}, {2, 3, 4, 5, 6, 7, 8}})
    ->ArgsProduct({{1, 2, 4, 5, 6}, {4}});

void BM_GreedyDecide(benchmark::State& state) {
    const int n_actions = static_cast<int>(state.range(0));
    const int n_incentives = static_cast<int>(state.range(1));
    const IdpModel model = experiment_model(n_actions, n_incentives, 1.0);
    const JointPrior prior = uniform_monotone_prior(n_actions, n_incentives);
    const IncentiveRanges full = IncentiveRanges::full(n_actions, n_incentives);
    for (auto _ : state) {
        benchmark::DoNotOptimize(greedy_decide(model, prior, full));
    }
}
BENCHMARK(BM_GreedyDecide)->Args({3, 5})->Args({5, 3});

void BM_ReachableEnumeration(benchmark::State& state) {
    const int n_actions = static_cast<int>(state.range(0));
    const int n_incentives = static_cast<int>(state.range(1));
    const IdpModel model = experiment_model(n_actions, n_incentives, 1.0);
    const JointPrior prior = uniform_monotone_prior(n_actions, n_incentives);
    for (auto _ : state) {
        benchmark::DoNotOptimize(enumerate_reachable_states(model, prior));
    }
}
BENCHMARK(BM_ReachableEnumeration)->Args({2, 8})->Args({3, 5});

} // namespace

BENCHMARK_MAIN();
