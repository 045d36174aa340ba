#include <benchmark/benchmark.h>

#include "gemd/proximity.hpp"
#include "gemd/solver.hpp"
#include "gemd/synth.hpp"
#include "gemd/ultimatewalk.hpp"

namespace {

void BM_WalkEstimate(benchmark::State& state) {
  gemd::Graph g =
      gemd::random_pair_graph(static_cast<int>(state.range(0) / 10), state.range(0), 11);
  gemd::WalkConfig cfg;
  cfg.trials = 50;
  cfg.walk_length = 7;
  for (auto _ : state) {
    auto counts = gemd::fst_walk_estimate(g, cfg);
    benchmark::DoNotOptimize(counts.counts.nonZeros());
  }
  state.SetItemsProcessed(state.iterations() * g.node_count() * cfg.trials * cfg.walk_length);
}
BENCHMARK(BM_WalkEstimate)->Arg(10000)->Arg(40000)->Unit(benchmark::kMillisecond);

void BM_BiasedWalkEstimate(benchmark::State& state) {
  gemd::Graph g =
      gemd::random_pair_graph(static_cast<int>(state.range(0) / 10), state.range(0), 11);
  gemd::WalkConfig cfg;
  cfg.trials = 50;
  cfg.walk_length = 7;
  cfg.p = 0.25;
  cfg.q = 4.0;
  for (auto _ : state) {
    auto counts = gemd::fsmt_walk_estimate(g, cfg);
    benchmark::DoNotOptimize(counts.counts.nonZeros());
  }
}
BENCHMARK(BM_BiasedWalkEstimate)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_TruncatedSvdSparse(benchmark::State& state) {
  gemd::Graph g =
      gemd::random_pair_graph(static_cast<int>(state.range(0) / 10), state.range(0), 13);
  gemd::WalkConfig cfg;
  cfg.trials = 50;
  cfg.walk_length = 7;
  const gemd::SparseRM z = gemd::proxy_matrix(
      gemd::estimated_proximity(gemd::fst_walk_estimate(g, cfg)), gemd::WarpSpec::exponential());
  for (auto _ : state) {
    auto svd = gemd::truncated_svd(z, 16);
    benchmark::DoNotOptimize(svd.values.sum());
  }
}
BENCHMARK(BM_TruncatedSvdSparse)->Arg(10000)->Arg(40000)->Unit(benchmark::kMillisecond);

void BM_ScalablePipeline(benchmark::State& state) {
  gemd::Graph g =
      gemd::random_pair_graph(static_cast<int>(state.range(0) / 10), state.range(0), 17);
  gemd::WalkConfig cfg;
  cfg.dim = 16;
  for (auto _ : state) {
    auto pair = gemd::ultimatewalk_scalable(g, cfg);
    benchmark::DoNotOptimize(pair.f.sum());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ScalablePipeline)->Arg(10000)->Arg(40000)->Arg(80000)->Unit(benchmark::kMillisecond);

void BM_ClosedPipeline(benchmark::State& state) {
  gemd::SbmSpec spec;
  spec.nodes = static_cast<int>(state.range(0));
  spec.blocks = 4;
  spec.within_prob = 0.1;
  spec.between_prob = 0.01;
  gemd::LabeledGraph lg = gemd::sbm_graph(spec, 19);
  gemd::WalkConfig cfg;
  cfg.dim = 16;
  for (auto _ : state) {
    auto pair = gemd::ultimatewalk_closed(lg.graph, cfg);
    benchmark::DoNotOptimize(pair.f.sum());
  }
}
BENCHMARK(BM_ClosedPipeline)->Arg(200)->Arg(400)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
