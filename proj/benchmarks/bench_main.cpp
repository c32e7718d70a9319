#include <benchmark/benchmark.h>

#include <vector>

#include "lilbound/bound.hpp"
#include "lilbound/models.hpp"
#include "lilbound/montecarlo.hpp"
#include "lilbound/phi.hpp"

using namespace lilbound;

namespace {

BoundProblem walk_problem() {
    return {phi2(), SigmaProfile::power_law(0.5), NormingSequence::iterated_log(2.0), 0};
}

void BM_ConjugateNumeric(benchmark::State& state) {
    const PhiFunction phi = state.range(0) == 0 ? cosh_phi() : subexponential_phi();
    const std::vector<double> us = lin_spaced(0.1, 20.0, 64);
    for (auto _ : state)
        for (double u : us) benchmark::DoNotOptimize(conjugate_numeric(phi, u));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(us.size()));
}
BENCHMARK(BM_ConjugateNumeric)->Arg(0)->Arg(1);

void BM_QSum(benchmark::State& state) {
    const BoundProblem p = walk_problem();
    const GeometricFamily fam(3.0);
    const double u = static_cast<double>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(q_sum(fam, p, u).certified());
}
BENCHMARK(BM_QSum)->Arg(3)->Arg(6)->Unit(benchmark::kMicrosecond);

void BM_TheoremBound(benchmark::State& state) {
    const BoundProblem p = walk_problem();
    const std::vector<double> u = default_u_grid();
    for (auto _ : state) benchmark::DoNotOptimize(theorem_bound(p, u, 1.0).bounds());
}
BENCHMARK(BM_TheoremBound)->Unit(benchmark::kMillisecond);

void BM_ChaosSimulation(benchmark::State& state) {
    const MartingaleModel m = MartingaleModel::chaos(static_cast<int>(state.range(0)));
    const NormingSequence v = NormingSequence::iterated_log(2.0 / static_cast<double>(state.range(0)));
    const std::vector<double> u = default_u_grid();
    const std::int64_t horizon = 4096;
    const std::uint64_t paths = 2000;
    for (auto _ : state) benchmark::DoNotOptimize(empirical_sup_tail(m, v, horizon, paths, u, 1, {.workers = 1}));
    state.SetItemsProcessed(state.iterations() * horizon * static_cast<std::int64_t>(paths));
}
BENCHMARK(BM_ChaosSimulation)->Arg(1)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
