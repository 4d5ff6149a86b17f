#include <benchmark/benchmark.h>

#include <cstdint>
#include <vector>

#include "groupdiff/linalg.hpp"
#include "groupdiff/preprocess.hpp"
#include "groupdiff/quartic_fit.hpp"
#include "groupdiff/rng.hpp"
#include "groupdiff/stat_bounds.hpp"
#include "groupdiff/types.hpp"
#include "harness/experiment.hpp"

namespace {

groupdiff::NoisySampleSet make_samples(std::int64_t L) {
    harness::ExperimentConfig config;
    config.L = L;
    config.sigma2 = 0.2;
    return harness::generate_samples(config, 1);
}

groupdiff::GroupedObservations make_grouped(std::int64_t M) {
    groupdiff::GroupedObservations grouped;
    grouped.coarse_grid = groupdiff::UniformGrid{M};
    grouped.group_means.resize(static_cast<std::size_t>(M));
    for (std::size_t i = 0; i < grouped.group_means.size(); ++i) {
        grouped.group_means[i] = 2.0 * groupdiff::uniform_at(7, i) - 1.0;
    }
    grouped.left_endpoint_value = 0.25;
    grouped.right_endpoint_value = -0.5;
    grouped.group_size = 1;
    return grouped;
}

void bm_group_samples(benchmark::State& state) {
    const groupdiff::NoisySampleSet samples = make_samples(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(groupdiff::group_samples(samples, 10));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void bm_fit(benchmark::State& state) {
    const groupdiff::GroupedObservations grouped = make_grouped(state.range(0));
    groupdiff::FitConfig config;
    config.alpha_mode = groupdiff::ExplicitAlpha{1e-3};
    for (auto _ : state) {
        benchmark::DoNotOptimize(groupdiff::fit(grouped, config));
    }
}

void bm_fit_full_kkt(benchmark::State& state) {
    const groupdiff::GroupedObservations grouped = make_grouped(state.range(0));
    groupdiff::FitConfig config;
    config.alpha_mode = groupdiff::ExplicitAlpha{1e-3};
    config.solver = groupdiff::SolverPath::full_kkt;
    for (auto _ : state) {
        benchmark::DoNotOptimize(groupdiff::fit(grouped, config));
    }
}

void bm_fitter_reuse(benchmark::State& state) {
    const groupdiff::GroupedObservations grouped = make_grouped(state.range(0));
    groupdiff::QuarticFitter fitter(grouped.coarse_grid.node_count, 1e-3);
    for (auto _ : state) {
        benchmark::DoNotOptimize(fitter.fit(grouped));
    }
}

void bm_quantile_bound(benchmark::State& state) {
    const std::int64_t M = state.range(0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(groupdiff::chi_upper_quantile_bound(M, 0.05));
    }
}

void bm_end_to_end(benchmark::State& state) {
    const groupdiff::NoisySampleSet samples = make_samples(state.range(0));
    groupdiff::FitConfig config;
    config.alpha_mode = groupdiff::CbarRule{0.0239, 0.2, state.range(0) / 10};
    for (auto _ : state) {
        const groupdiff::GroupedObservations grouped = groupdiff::group_samples(samples, 10);
        benchmark::DoNotOptimize(groupdiff::fit(grouped, config));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(bm_group_samples)->Arg(1000)->Arg(100000)->Arg(1000000);
BENCHMARK(bm_fit)->Arg(10)->Arg(100)->Arg(1000);
BENCHMARK(bm_fit_full_kkt)->Arg(10)->Arg(100);
BENCHMARK(bm_fitter_reuse)->Arg(10)->Arg(100)->Arg(1000);
BENCHMARK(bm_quantile_bound)->Arg(10)->Arg(1000000);
BENCHMARK(bm_end_to_end)->Arg(1000)->Arg(1000000);

BENCHMARK_MAIN();
