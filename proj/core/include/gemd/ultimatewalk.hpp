#pragma once

#include <functional>
#include <span>
#include <vector>

#include "gemd/graph.hpp"
#include "gemd/proximity.hpp"
#include "gemd/solver.hpp"
#include "gemd/walk_config.hpp"

namespace gemd {

// The matrix the closed pipeline factorizes: finite-step proximity, memory-
// modulated when p or q differ from 1.
ProximityMatrix closed_form_proximity(const Graph& g, const WalkConfig& cfg,
                                      int dense_cap = 20000);

// One split's walk-estimated proximity (counts / trials-per-split); the
// scalable pipeline averages proxies of splits 0..cfg.splits-1.
ProximityMatrix estimated_split_proximity(const Graph& g, const WalkConfig& cfg, int split);

// Closed-form pipeline: build the finite-step proximity matrix, unwarp it
// with zeros clipped at -clip_c, and factorize by truncated SVD. Refuses
// graphs above `dense_cap` nodes, where the dense unwarped matrix stops
// being affordable.
EmbeddingPair ultimatewalk_closed(const Graph& g, const WalkConfig& cfg, double gamma = 0.0,
                                  int dense_cap = 20000);

// Scalable pipeline: visit counts from m random-walk trials per node, sparse
// shifted-log proxy over the observed support, truncated SVD. With
// cfg.splits = T > 1, T independent estimates with m/T trials each are
// averaged entrywise (absent entries count as zero) before factorizing.
EmbeddingPair ultimatewalk_scalable(const Graph& g, const WalkConfig& cfg, double gamma = 0.0);

// The T >= 2 averaging entry point; cfg.splits must divide cfg.trials.
EmbeddingPair split_average(const Graph& g, const WalkConfig& cfg, double gamma = 0.0);

// Sparse proxy of the unwarped proximity: unwarp(pi) + clip_c on the support
// of the estimate, zero elsewhere.
SparseRM proxy_matrix(const ProximityMatrix& estimated, const WarpSpec& spec);

struct ScalingRow {
  std::size_t edges;
  double seconds;
};

using GraphGenerator = std::function<Graph(std::size_t target_edges, std::uint64_t seed)>;

// Wall time of the scalable pipeline per generated graph size (best of two
// runs). The (edges, seconds) rows feed the linear-scaling check.
std::vector<ScalingRow> benchmark_scaling(const GraphGenerator& generator,
                                          std::span<const std::size_t> sizes,
                                          const WalkConfig& cfg);

}  // namespace gemd
