#include <benchmark/benchmark.h>

#include "umatch/generators.hpp"
#include "umatch/perturb.hpp"
#include "umatch/reconcile.hpp"

namespace {

using namespace umatch;

struct Instance {
  CopyPair pair;
  LinkSet seeds;
};

Instance make_instance(unsigned scale) {
  RmatParams params;
  params.scale = scale;
  const Graph g = gen_rmat(params, RngSeed{11});
  Instance inst{copy_independent(g, 0.5, 0.5, true, RngSeed{12}), {}};
  inst.seeds = sample_seeds(inst.pair, 0.1, RngSeed{13});
  return inst;
}

void BM_GenRmat(benchmark::State& state) {
  RmatParams params;
  params.scale = static_cast<unsigned>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(gen_rmat(params, RngSeed{1}));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(params.edge_factor << params.scale));
}
BENCHMARK(BM_GenRmat)->Arg(12)->Arg(14)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_GenPa(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(gen_pa(n, 10, RngSeed{1}));
}
BENCHMARK(BM_GenPa)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

void BM_CountWitnesses(benchmark::State& state) {
  const auto inst = make_instance(static_cast<unsigned>(state.range(0)));
  const auto min_degree = static_cast<std::uint32_t>(state.range(1));
  for (auto _ : state) {
    benchmark::DoNotOptimize(count_witnesses(inst.pair.g1, inst.pair.g2, inst.seeds, min_degree));
  }
}
BENCHMARK(BM_CountWitnesses)->Args({12, 1})->Args({14, 1})->Args({14, 16})->Unit(benchmark::kMillisecond);

void BM_UserMatching(benchmark::State& state) {
  const auto inst = make_instance(static_cast<unsigned>(state.range(0)));
  MatchConfig cfg;
  cfg.bucketing = state.range(1) != 0;
  cfg.route = state.range(2) != 0 ? ScoringRoute::kTable : ScoringRoute::kFused;
  for (auto _ : state) benchmark::DoNotOptimize(user_matching(inst.pair.g1, inst.pair.g2, inst.seeds, cfg));
}
BENCHMARK(BM_UserMatching)
    ->ArgNames({"scale", "bucketing", "table"})
    ->Args({12, 1, 0})
    ->Args({12, 0, 0})
    ->Args({12, 1, 1})
    ->Args({14, 1, 0})
    ->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
