#include "gemd/proximity.hpp"

#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "gemd/rng.hpp"

namespace gemd {

namespace {

constexpr double kDropThreshold = 1e-12;
// Past this fill ratio the sparse accumulator costs more than a dense one.
constexpr double kDensifyRatio = 0.35;

}  // namespace

ProximityMatrix fst(const ProximityMatrix& transition, int steps) {
  if (steps < 1) throw std::invalid_argument("fst: steps must be >= 1");
  const SparseRM& p = transition.sparse();
  const Eigen::Index n = p.rows();

  SparseRM term = p;
  SparseRM acc = p;
  Eigen::MatrixXd term_d, acc_d;
  bool dense_mode = false;
  for (int l = 2; l <= steps; ++l) {
    if (!dense_mode) {
      SparseRM next = term * p;
      next.prune(1.0, kDropThreshold);
      term = std::move(next);
      acc = SparseRM(acc + term);
      if (acc.nonZeros() > kDensifyRatio * static_cast<double>(n) * static_cast<double>(n)) {
        term_d = Eigen::MatrixXd(term);
        acc_d = Eigen::MatrixXd(acc);
        dense_mode = true;
      }
    } else {
      term_d = (term_d * p).eval();
      acc_d += term_d;
    }
  }
  ProximityParams params;
  params.steps = steps;
  if (dense_mode) return {std::move(acc_d), ProximityKind::fst, params};
  return {std::move(acc), ProximityKind::fst, params};
}

ProximityMatrix ist(const ProximityMatrix& transition, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("ist: alpha must lie in (0, 1)");
  const SparseRM& p = transition.sparse();
  const Eigen::Index n = p.rows();

  Eigen::SparseMatrix<double> system(n, n);
  {
    Eigen::SparseMatrix<double> id(n, n);
    id.setIdentity();
    system = id - alpha * Eigen::SparseMatrix<double>(p);
  }
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(system);
  if (lu.info() != Eigen::Success)
    throw std::runtime_error("ist: factorization of (I - alpha P) failed");

  // Solve (I - alpha P) X = I in column blocks, then (1/alpha)(X - I).
  Eigen::MatrixXd result(n, n);
  const Eigen::Index block = 64;
  for (Eigen::Index c0 = 0; c0 < n; c0 += block) {
    const Eigen::Index w = std::min(block, n - c0);
    Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(n, w);
    for (Eigen::Index j = 0; j < w; ++j) rhs(c0 + j, j) = 1.0;
    result.middleCols(c0, w) = lu.solve(rhs);
  }
  result.diagonal().array() -= 1.0;
  result /= alpha;

  ProximityParams params;
  params.alpha = alpha;
  return {std::move(result), ProximityKind::ist, params};
}

FsmtOperators fsmt_operators(const Graph& g, double p, double q, DanglingPolicy policy,
                             int dense_cap) {
  const int n = g.node_count();
  if (n < 1) throw std::invalid_argument("fsmt_operators: empty graph");
  if (n > dense_cap)
    throw std::invalid_argument(
        "fsmt_operators: graph has " + std::to_string(n) + " nodes, above the " +
        std::to_string(dense_cap) +
        "-node cap for the expanded operator; use fsmt_walk_estimate instead");
  if (!(p > 0.0) || !(q > 0.0))
    throw std::invalid_argument("fsmt_operators: p and q must be positive");

  FsmtOperators ops;
  ops.n = n;
  ops.p = p;
  ops.q = q;

  // Memory matrix from exact geodesic distances in the undirected view.
  // Only distances <= 2 carry non-zero factors, so a two-level BFS suffices.
  Eigen::MatrixXd memory_d = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    memory_d(i, i) = 1.0 / p;
    for (int j : g.und_neighbors(i)) {
      if (j != i) memory_d(i, j) = 1.0;
    }
    for (int j : g.und_neighbors(i)) {
      for (int k : g.und_neighbors(j)) {
        if (k != i && memory_d(i, k) == 0.0) memory_d(i, k) = 1.0 / q;
      }
    }
  }
  ops.memory = memory_d.sparseView();

  const auto state = [n](int current, int previous) {
    return static_cast<Eigen::Index>(current) * n + previous;
  };

  const ProximityMatrix pm = transition_matrix(g, policy);
  const SparseRM& trans = pm.sparse();

  // Q: start m steps to k with probability P[m,k]; the state records m as
  // the walker's memory.
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(trans.nonZeros());
  for (Eigen::Index m = 0; m < n; ++m)
    for (SparseRM::InnerIterator it(trans, m); it; ++it)
      trips.emplace_back(m, state(static_cast<int>(it.col()), static_cast<int>(m)), it.value());
  ops.initial = SparseRM(n, static_cast<Eigen::Index>(n) * n);
  ops.initial.setFromTriplets(trips.begin(), trips.end());

  // Phi = I_n (x) 1_n^T: row i sums every state whose current node is i.
  trips.clear();
  for (int i = 0; i < n; ++i)
    for (int l = 0; l < n; ++l) trips.emplace_back(i, state(i, l), 1.0);
  ops.merge = SparseRM(n, static_cast<Eigen::Index>(n) * n);
  ops.merge.setFromTriplets(trips.begin(), trips.end());

  // W column (k, l): step out of current node k with memory l. Candidate v
  // gets weight A[k,v] * M[v,l]; dangling nodes follow the policy.
  trips.clear();
  for (int k = 0; k < n; ++k) {
    const auto nbrs = g.neighbors(k);
    const auto ws = g.neighbor_weights(k);
    for (int l = 0; l < n; ++l) {
      const Eigen::Index col = state(k, l);
      if (nbrs.empty()) {
        if (policy == DanglingPolicy::self_loop) trips.emplace_back(state(k, k), col, 1.0);
        continue;
      }
      double norm = 0.0;
      for (std::size_t i = 0; i < nbrs.size(); ++i) norm += ws[i] * memory_d(nbrs[i], l);
      if (norm <= 0.0) continue;  // state unreachable by any walk
      for (std::size_t i = 0; i < nbrs.size(); ++i) {
        const double w = ws[i] * memory_d(nbrs[i], l);
        if (w > 0.0) trips.emplace_back(state(nbrs[i], k), col, w / norm);
      }
    }
  }
  ops.expanded = SparseRM(static_cast<Eigen::Index>(n) * n, static_cast<Eigen::Index>(n) * n);
  ops.expanded.setFromTriplets(trips.begin(), trips.end());
  return ops;
}

ProximityMatrix fsmt(const FsmtOperators& ops, int steps) {
  if (steps < 1) throw std::invalid_argument("fsmt: steps must be >= 1");
  SparseRM states = SparseRM(ops.initial.transpose());  // n^2 x n, column = start node
  Eigen::MatrixXd acc = Eigen::MatrixXd(ops.merge * states);
  for (int l = 1; l < steps; ++l) {
    states = (ops.expanded * states).pruned();
    acc += ops.merge * states;
  }
  ProximityParams params;
  params.steps = steps;
  params.p = ops.p;
  params.q = ops.q;
  // acc is (visited node) x (start node); hand out start-major rows.
  return {Eigen::MatrixXd(acc.transpose()), ProximityKind::fsmt, params};
}

namespace {

// One weighted first-order step; -1 means the walker died on a dangling node.
inline int step_first_order(const Graph& g, int cur, CounterRng& rng, DanglingPolicy policy) {
  if (g.is_dangling(cur)) return policy == DanglingPolicy::self_loop ? cur : -1;
  const auto prefix = g.neighbor_weight_prefix(cur);
  const double target = rng.next_double() * prefix.back();
  const auto it = std::upper_bound(prefix.begin(), prefix.end(), target);
  const std::size_t idx = it == prefix.end() ? prefix.size() - 1
                                             : static_cast<std::size_t>(it - prefix.begin());
  return g.neighbors(cur)[idx];
}

inline int step_second_order(const Graph& g, int cur, int prev, double inv_p, double inv_q,
                             CounterRng& rng, DanglingPolicy policy,
                             std::vector<double>& prefix) {
  if (g.is_dangling(cur)) return policy == DanglingPolicy::self_loop ? cur : -1;
  const auto nbrs = g.neighbors(cur);
  const auto ws = g.neighbor_weights(cur);
  prefix.resize(nbrs.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < nbrs.size(); ++i) {
    const int j = nbrs[i];
    const double bias = j == prev ? inv_p : (g.und_adjacent(j, prev) ? 1.0 : inv_q);
    acc += ws[i] * bias;
    prefix[i] = acc;
  }
  const double target = rng.next_double() * acc;
  const auto it = std::upper_bound(prefix.begin(), prefix.end(), target);
  const std::size_t idx = it == prefix.end() ? prefix.size() - 1
                                             : static_cast<std::size_t>(it - prefix.begin());
  return nbrs[idx];
}

template <bool kSecondOrder>
VisitCounts walk_estimate_impl(const Graph& g, const WalkConfig& cfg, DanglingPolicy policy) {
  if (cfg.trials < 1) throw std::invalid_argument("walk estimate: trials must be >= 1");
  if (cfg.walk_length < 1) throw std::invalid_argument("walk estimate: walk_length must be >= 1");
  if (!(cfg.p > 0.0) || !(cfg.q > 0.0))
    throw std::invalid_argument("walk estimate: p and q must be positive");
  const int n = g.node_count();
  if (n < 1) throw std::invalid_argument("walk estimate: empty graph");

  // p = q = 1 short-circuits to plain steps so the biased walker reproduces
  // the first-order trajectories draw for draw.
  const bool plain = !kSecondOrder || (cfg.p == 1.0 && cfg.q == 1.0);
  const double inv_p = 1.0 / cfg.p;
  const double inv_q = 1.0 / cfg.q;

  std::vector<std::vector<std::pair<int, std::int64_t>>> rows(n);

#pragma omp parallel
  {
    std::vector<std::int64_t> row(n, 0);
    std::vector<int> touched;
    std::vector<double> scratch;
#pragma omp for schedule(dynamic, 8)
    for (int start = 0; start < n; ++start) {
      for (int trial = 0; trial < cfg.trials; ++trial) {
        CounterRng rng(cfg.seed, static_cast<std::uint64_t>(start),
                       static_cast<std::uint64_t>(trial));
        int cur = start;
        int prev = -1;
        for (int step = 0; step < cfg.walk_length; ++step) {
          int next;
          if (plain || prev < 0)
            next = step_first_order(g, cur, rng, policy);
          else
            next = step_second_order(g, cur, prev, inv_p, inv_q, rng, policy, scratch);
          if (next < 0) break;
          prev = cur;
          cur = next;
          if (row[cur]++ == 0) touched.push_back(cur);
        }
      }
      std::sort(touched.begin(), touched.end());
      auto& dst = rows[start];
      dst.reserve(touched.size());
      for (int j : touched) {
        dst.emplace_back(j, row[j]);
        row[j] = 0;
      }
      touched.clear();
    }
  }

  VisitCounts vc;
  vc.trials = cfg.trials;
  vc.walk_length = cfg.walk_length;
  vc.seed = cfg.seed;
  vc.counts.resize(n, n);
  std::vector<Eigen::Triplet<std::int64_t>> trips;
  std::size_t total = 0;
  for (const auto& r : rows) total += r.size();
  trips.reserve(total);
  for (int i = 0; i < n; ++i)
    for (const auto& [j, c] : rows[i]) trips.emplace_back(i, j, c);
  vc.counts.setFromTriplets(trips.begin(), trips.end());
  return vc;
}

}  // namespace

VisitCounts fst_walk_estimate(const Graph& g, const WalkConfig& cfg, DanglingPolicy policy) {
  return walk_estimate_impl<false>(g, cfg, policy);
}

VisitCounts fsmt_walk_estimate(const Graph& g, const WalkConfig& cfg, DanglingPolicy policy) {
  return walk_estimate_impl<true>(g, cfg, policy);
}

ProximityMatrix estimated_proximity(const VisitCounts& vc, double p, double q) {
  const double inv_m = 1.0 / static_cast<double>(vc.trials);
  SparseRM pi(vc.counts.rows(), vc.counts.cols());
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(vc.counts.nonZeros());
  for (Eigen::Index i = 0; i < vc.counts.outerSize(); ++i)
    for (Eigen::SparseMatrix<std::int64_t, Eigen::RowMajor>::InnerIterator it(vc.counts, i); it;
         ++it)
      trips.emplace_back(it.row(), it.col(), static_cast<double>(it.value()) * inv_m);
  pi.setFromTriplets(trips.begin(), trips.end());
  ProximityParams params;
  params.steps = vc.walk_length;
  params.trials = vc.trials;
  params.p = p;
  params.q = q;
  const bool plain = p == 1.0 && q == 1.0;
  return {std::move(pi), plain ? ProximityKind::estimated_fst : ProximityKind::estimated_fsmt,
          params};
}

}  // namespace gemd
