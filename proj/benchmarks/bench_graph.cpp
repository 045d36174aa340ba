#include <benchmark/benchmark.h>

#include <filesystem>

#include "gemd/graph.hpp"
#include "gemd/proximity.hpp"
#include "gemd/synth.hpp"

namespace {

std::string edge_list_fixture(std::size_t edges) {
  namespace fs = std::filesystem;
  const fs::path path =
      fs::temp_directory_path() / ("gemd_bench_" + std::to_string(edges) + ".tsv");
  if (!fs::exists(path)) {
    gemd::Graph g = gemd::random_pair_graph(static_cast<int>(edges / 10), edges, 7);
    gemd::write_edge_list(g, path.string());
  }
  return path.string();
}

void BM_LoadEdgeList(benchmark::State& state) {
  const std::string path = edge_list_fixture(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    gemd::Graph g = gemd::load_edge_list(path, false);
    benchmark::DoNotOptimize(g.arc_count());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_LoadEdgeList)->Arg(10000)->Arg(40000)->Unit(benchmark::kMillisecond);

void BM_TransitionMatrix(benchmark::State& state) {
  gemd::Graph g =
      gemd::random_pair_graph(static_cast<int>(state.range(0) / 10), state.range(0), 7);
  for (auto _ : state) {
    auto p = gemd::transition_matrix(g);
    benchmark::DoNotOptimize(p.nonzero_count());
  }
}
BENCHMARK(BM_TransitionMatrix)->Arg(10000)->Arg(40000)->Unit(benchmark::kMillisecond);

void BM_FstClosed(benchmark::State& state) {
  gemd::SbmSpec spec;
  spec.nodes = static_cast<int>(state.range(0));
  spec.blocks = 4;
  spec.within_prob = 0.1;
  spec.between_prob = 0.01;
  gemd::LabeledGraph lg = gemd::sbm_graph(spec, 7);
  auto p = gemd::transition_matrix(lg.graph);
  for (auto _ : state) {
    auto pi = gemd::fst(p, 7);
    benchmark::DoNotOptimize(pi.rows());
  }
}
BENCHMARK(BM_FstClosed)->Arg(200)->Arg(400)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
