// Serial reference kernels against their OpenMP versions.
#include <map>

#include <benchmark/benchmark.h>

#include "posrep/sampler.hpp"

using namespace posrep;

namespace {

const TDensity& density(int N) {
    static std::map<int, TDensity> cache;
    auto it = cache.find(N);
    if (it == cache.end()) {
        auto table = build_moment_table(ComplexWeightSpec::gaussian_phase(std::vector<double>(N, 1.0)), 6);
        auto t = construct_t(table, RadialMomentModel::iid(RadialModel1D::half_gaussian(), N),
                             LambdaChoice::with_margin(N), 6);
        it = cache.emplace(N, std::move(t)).first;
    }
    return it->second;
}

Exec mode(const benchmark::State& s) { return s.range(1) ? Exec::parallel : Exec::serial; }

void BM_SampleEnsemble(benchmark::State& state) {
    const auto& t = density(static_cast<int>(state.range(0)));
    for (auto _ : state)
        benchmark::DoNotOptimize(sample_ensemble(t, 100000, 1, mode(state)).proposals);
    state.SetItemsProcessed(state.iterations() * 100000);
}

void BM_EstimateMoment(benchmark::State& state) {
    const int N = static_cast<int>(state.range(0));
    auto e = sample_ensemble(density(N), 200000, 2);
    std::vector<int> m(static_cast<std::size_t>(N), 0);
    m[0] = 4;
    for (auto _ : state)
        benchmark::DoNotOptimize(estimate_moment(e, MultiIndex(m), mode(state)).value);
    state.SetItemsProcessed(state.iterations() * 200000);
}

void BM_PositivityGrid(benchmark::State& state) {
    const auto& t = density(static_cast<int>(state.range(0)));
    for (auto _ : state)
        benchmark::DoNotOptimize(certify_positivity(t.angular, 100000, mode(state)).grid_min);
}

} // namespace

BENCHMARK(BM_SampleEnsemble)->ArgsProduct({{1, 2}, {0, 1}})->ArgNames({"N", "parallel"})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EstimateMoment)->ArgsProduct({{1, 3}, {0, 1}})->ArgNames({"N", "parallel"})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PositivityGrid)->ArgsProduct({{1, 2, 3}, {0, 1}})->ArgNames({"N", "parallel"})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
