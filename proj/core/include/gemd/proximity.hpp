#pragma once

#include <cstdint>

#include "gemd/graph.hpp"
#include "gemd/matrix.hpp"
#include "gemd/walk_config.hpp"

namespace gemd {

// Finite-step transition matrix: sum of P^l for l = 1..L. Entry (i, j) is the
// expected number of visits to j over an L-step walk started at i. Sparse
// accumulation drops entries below 1e-12 after each multiply and switches to
// dense storage once the accumulator stops being meaningfully sparse.
ProximityMatrix fst(const ProximityMatrix& transition, int steps);

// Infinite-step transition matrix (1/alpha)((I - alpha P)^-1 - I), computed
// by sparse LU solves against identity columns, never via an explicit
// inverse. alpha in (0, 1).
ProximityMatrix ist(const ProximityMatrix& transition, double alpha);

// Exact operator form of the memory-modulated walk. States are (current,
// previous) pairs indexed current * n + previous. Validation-scale only: the
// expanded operator is n^2 x n^2.
struct FsmtOperators {
  int n = 0;
  double p = 1.0;
  double q = 1.0;
  SparseRM memory;    // n x n   M: 1/p on the diagonal, 1 at distance 1, 1/q at distance 2
  SparseRM initial;   // n x n^2 Q: first-order first step, recording the start as memory
  SparseRM merge;     // n x n^2 Phi: sums states by their current node
  SparseRM expanded;  // n^2 x n^2 W: memory-biased step, column-stochastic on reachable states
};

FsmtOperators fsmt_operators(const Graph& g, double p, double q,
                             DanglingPolicy policy = DanglingPolicy::self_loop,
                             int dense_cap = 64);

// Assembles Phi (sum_{l=0}^{L-1} W^l) Q^T and returns it in start-major
// orientation: entry (i, j) is the expected visit count of j by an L-step
// memory-modulated walk from i.
ProximityMatrix fsmt(const FsmtOperators& ops, int steps);

// Raw visit counts from m independent L-step walks per start node.
// counts(i, j) = number of times walks from i stood on j at steps 1..L.
struct VisitCounts {
  Eigen::SparseMatrix<std::int64_t, Eigen::RowMajor> counts;
  int trials = 0;
  int walk_length = 0;
  std::uint64_t seed = 0;
};

// First-order estimator. Per-(start, trial) streams are keyed on
// (cfg.seed, start, trial), so results are identical for any worker count.
VisitCounts fst_walk_estimate(const Graph& g, const WalkConfig& cfg,
                              DanglingPolicy policy = DanglingPolicy::self_loop);

// Second-order estimator. The step from current node k to candidate j with
// previous node t is proportional to A[k,j] * w, where w = 1/p if j == t,
// 1 if j and t are adjacent in the undirected view, 1/q otherwise. The first
// step is first-order; p = q = 1 reproduces fst_walk_estimate trajectories
// exactly.
VisitCounts fsmt_walk_estimate(const Graph& g, const WalkConfig& cfg,
                               DanglingPolicy policy = DanglingPolicy::self_loop);

// counts / m as a sparse proximity matrix (estimated-fst or estimated-fsmt).
ProximityMatrix estimated_proximity(const VisitCounts& vc, double p = 1.0, double q = 1.0);

}  // namespace gemd
