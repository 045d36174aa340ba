#include "gemd/ultimatewalk.hpp"

#include <chrono>
#include <stdexcept>
#include <string>

#include "gemd/rng.hpp"

namespace gemd {

ProximityMatrix closed_form_proximity(const Graph& g, const WalkConfig& cfg, int dense_cap) {
  validate(cfg);
  const int n = g.node_count();
  if (n > dense_cap)
    throw std::invalid_argument("closed-form embedding: graph has " + std::to_string(n) +
                                " nodes, above the dense cap of " + std::to_string(dense_cap) +
                                "; use the scalable variant");
  if (cfg.p == 1.0 && cfg.q == 1.0) return fst(transition_matrix(g), cfg.walk_length);
  return fsmt(fsmt_operators(g, cfg.p, cfg.q), cfg.walk_length);
}

ProximityMatrix estimated_split_proximity(const Graph& g, const WalkConfig& cfg, int split) {
  validate(cfg);
  WalkConfig split_cfg = cfg;
  split_cfg.trials = cfg.trials / cfg.splits;
  split_cfg.seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(split));
  const bool biased = !(cfg.p == 1.0 && cfg.q == 1.0);
  const VisitCounts counts =
      biased ? fsmt_walk_estimate(g, split_cfg) : fst_walk_estimate(g, split_cfg);
  return estimated_proximity(counts, cfg.p, cfg.q);
}

EmbeddingPair ultimatewalk_closed(const Graph& g, const WalkConfig& cfg, double gamma,
                                  int dense_cap) {
  validate(cfg);
  const int n = g.node_count();
  if (n < cfg.dim)
    throw std::invalid_argument("closed-form embedding: graph has " + std::to_string(n) +
                                " nodes, fewer than dim = " + std::to_string(cfg.dim));
  ProximityMatrix pi = closed_form_proximity(g, cfg, dense_cap);
  const WarpSpec spec = WarpSpec::ibc(gamma, cfg.clip_c);
  SvdOptions opt;
  opt.seed = cfg.seed;
  return warped_frobenius_solve(pi, spec, cfg.dim, opt);
}

SparseRM proxy_matrix(const ProximityMatrix& estimated, const WarpSpec& spec) {
  SparseRM z(estimated.rows(), estimated.cols());
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(estimated.nonzero_count());
  estimated.for_each_nonzero([&](Eigen::Index i, Eigen::Index j, double v) {
    trips.emplace_back(i, j, unwarp(spec, v) + spec.clip_c);
  });
  z.setFromTriplets(trips.begin(), trips.end());
  return z;
}

namespace {

EmbeddingPair scalable_impl(const Graph& g, const WalkConfig& cfg, double gamma) {
  validate(cfg);
  const int n = g.node_count();
  if (n < cfg.dim)
    throw std::invalid_argument("scalable embedding: graph has " + std::to_string(n) +
                                " nodes, fewer than dim = " + std::to_string(cfg.dim));
  const WarpSpec spec = WarpSpec::ibc(gamma, cfg.clip_c);
  SparseRM accum(n, n);
  for (int t = 0; t < cfg.splits; ++t)
    accum = SparseRM(accum + proxy_matrix(estimated_split_proximity(g, cfg, t), spec));
  if (cfg.splits > 1) accum = SparseRM(accum / static_cast<double>(cfg.splits));

  SvdOptions opt;
  opt.seed = cfg.seed;
  TruncatedSvd svd = truncated_svd(accum, cfg.dim, opt);
  const Eigen::VectorXd root = svd.values.cwiseMax(0.0).cwiseSqrt();
  EmbeddingPair pair;
  pair.f = svd.u * root.asDiagonal();
  pair.f_hat = svd.v * root.asDiagonal();
  pair.singular_values = std::move(svd.values);
  return pair;
}

}  // namespace

EmbeddingPair ultimatewalk_scalable(const Graph& g, const WalkConfig& cfg, double gamma) {
  return scalable_impl(g, cfg, gamma);
}

EmbeddingPair split_average(const Graph& g, const WalkConfig& cfg, double gamma) {
  if (cfg.splits < 2) throw std::invalid_argument("split_average: splits must be >= 2");
  return scalable_impl(g, cfg, gamma);
}

std::vector<ScalingRow> benchmark_scaling(const GraphGenerator& generator,
                                          std::span<const std::size_t> sizes,
                                          const WalkConfig& cfg) {
  std::vector<ScalingRow> rows;
  rows.reserve(sizes.size());
  for (std::size_t idx = 0; idx < sizes.size(); ++idx) {
    const Graph g = generator(sizes[idx], derive_seed(cfg.seed, 0xb37c, idx));
    const std::size_t edges = g.directed() ? g.arc_count() : g.arc_count() / 2;
    double best = std::numeric_limits<double>::infinity();
    for (int rep = 0; rep < 2; ++rep) {
      const auto t0 = std::chrono::steady_clock::now();
      const EmbeddingPair pair = ultimatewalk_scalable(g, cfg);
      const auto t1 = std::chrono::steady_clock::now();
      (void)pair;
      best = std::min(best, std::chrono::duration<double>(t1 - t0).count());
    }
    rows.push_back({edges, best});
  }
  return rows;
}

}  // namespace gemd
