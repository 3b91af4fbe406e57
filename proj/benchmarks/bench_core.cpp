#include <benchmark/benchmark.h>

#include <vector>

#include "fairalloc/engine.hpp"
#include "fairalloc/oracle.hpp"

using namespace fairalloc;

namespace {

Environment bench_env(std::size_t sellers) {
  SynthSpec spec;
  spec.sellers = sellers;
  spec.items_min = 1;
  spec.items_max = 3;
  spec.seed = 1;
  return build_synth(spec);
}

RunConfig bench_config(std::uint64_t horizon) {
  RunConfig config;
  config.horizon = horizon;
  config.seed = 7;
  config.gamma0 = 10.0;
  config.regularizer.kind = RegularizerKind::AboveTarget;
  config.regularizer.basis = OutcomeBasis::Click;
  config.regularizer.alpha.value = 5.0;
  config.regularizer.beta.value = 0.5;
  return config;
}

void BM_rank_scores(benchmark::State& state) {
  const Environment env = bench_env(state.range(0));
  const Catalog& catalog = env.catalog();
  const DualState lambda{std::vector<double>(catalog.seller_count(), 0.1)};
  const std::vector<double> chat = env.effective_rate(OutcomeBasis::Click);
  for (auto _ : state) {
    benchmark::DoNotOptimize(rank_scores(catalog, lambda, chat));
  }
  state.SetItemsProcessed(state.iterations() * catalog.item_count());
}
BENCHMARK(BM_rank_scores)->Arg(50)->Arg(500)->Arg(5000);

void BM_selection_distribution(benchmark::State& state) {
  const Environment env = bench_env(state.range(0));
  const Catalog& catalog = env.catalog();
  const DualState lambda{std::vector<double>(catalog.seller_count(), 0.1)};
  const ScoreBoard board =
      rank_scores(catalog, lambda, env.effective_rate(OutcomeBasis::Click));
  for (auto _ : state) {
    benchmark::DoNotOptimize(selection_distribution(board, catalog.item_count(), 25.0));
  }
  state.SetItemsProcessed(state.iterations() * catalog.item_count());
}
BENCHMARK(BM_selection_distribution)->Arg(50)->Arg(500)->Arg(5000);

void BM_episode(benchmark::State& state) {
  const Environment env = bench_env(50);
  const RunConfig config = bench_config(state.range(0));
  EpisodeOptions options;
  options.record_trace = false;
  for (auto _ : state) {
    EmpiricalMeanEstimator estimator(env.catalog(), OutcomeBasis::Click);
    benchmark::DoNotOptimize(run_episode(config, env, estimator, options));
  }
  state.SetItemsProcessed(state.iterations() * config.horizon);
}
BENCHMARK(BM_episode)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

void BM_dual_solve(benchmark::State& state) {
  const Environment env = bench_env(50);
  RegularizerSpec spec;
  spec.kind = RegularizerKind::AboveTarget;
  spec.basis = OutcomeBasis::Click;
  spec.alpha.assign(env.catalog().seller_count(), 5.0);
  spec.beta.assign(env.catalog().seller_count(), 0.5);
  const HindsightInstance instance = instance_from_environment(env, spec, 100000);
  for (auto _ : state) {
    benchmark::DoNotOptimize(dual_solve_offline(instance, state.range(0)));
  }
}
BENCHMARK(BM_dual_solve)->Arg(1000)->Arg(5000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
