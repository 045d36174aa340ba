#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gemd/matrix.hpp"
#include "gemd/warping.hpp"

namespace gemd {

// Dual embedding matrices: f captures in-edge behavior, f_hat out-edge
// behavior. The per-node output representation is their concatenation.
struct EmbeddingPair {
  Eigen::MatrixXd f;       // N x K
  Eigen::MatrixXd f_hat;   // N x K
  Eigen::VectorXd singular_values;  // K, non-increasing; empty for descent solutions

  int dim() const { return static_cast<int>(f.cols()); }
  Eigen::MatrixXd concatenated() const {
    Eigen::MatrixXd out(f.rows(), f.cols() + f_hat.cols());
    out << f, f_hat;
    return out;
  }
};

struct SvdOptions {
  int oversample = 8;
  int power_iterations = 6;
  std::uint64_t seed = 1;
};

struct TruncatedSvd {
  Eigen::MatrixXd u;       // rows x k, orthonormal columns
  Eigen::VectorXd values;  // k, non-increasing
  Eigen::MatrixXd v;       // cols x k, orthonormal columns
};

// Rank-k truncated SVD by seeded randomized subspace iteration. Column signs
// are fixed (largest-magnitude entry of each left vector is positive) so
// results are bit-reproducible. Matrices whose small dimension is at most 64
// are captured exactly (the sampled subspace is widened to the full space).
TruncatedSvd truncated_svd(const Eigen::MatrixXd& a, int k, const SvdOptions& opt = {});
TruncatedSvd truncated_svd(const SparseRM& a, int k, const SvdOptions& opt = {});

// The unwarped target matrix: unwarp applied to non-zero entries, zeros (and
// anything below the unwarp domain) replaced by unwarp_floor(spec). For the
// exponential family this is log(pi) with zeros at -clip_c.
Eigen::MatrixXd warped_inverse(const ProximityMatrix& pi, const WarpSpec& spec);

// Minimizes || F F_hat^T - unwarp(pi) ||_F^2 at rank k via truncated SVD:
// F = U S^(1/2), F_hat = V S^(1/2).
EmbeddingPair warped_frobenius_solve(const ProximityMatrix& pi, const WarpSpec& spec, int k,
                                     const SvdOptions& opt = {});

// Row-normalized KL divergence between pi and warp(F F_hat^T); zero entries
// of pi contribute zero. Throws when a row of pi sums to zero.
double kl_loss(const ProximityMatrix& pi, const EmbeddingPair& pair, const WarpSpec& spec);

struct KlDescentConfig {
  double step = 0.5;
  int max_iterations = 2000;
  double tolerance = 1e-9;      // relative loss change
  std::uint64_t seed = 7;
};

// Full-batch gradient descent on the KL loss from seeded Gaussian
// initialization (scale 0.1/sqrt(k)). The step is halved whenever a move
// would increase the loss and regrown slightly on success; the best-loss
// iterate is returned. Supports the exponential (gamma = 0) and sigmoid
// warps, whose gradients are closed-form.
EmbeddingPair kl_descent(const ProximityMatrix& pi, const WarpSpec& spec, int k,
                         const KlDescentConfig& cfg);

// Embedding file: header `node<TAB>f_1..f_K<TAB>fhat_1..fhat_K`, one row per
// node with the concatenated representation. Values round-trip exactly.
void write_embedding(const std::string& path, const std::vector<std::string>& node_ids,
                     const EmbeddingPair& pair);

struct NamedEmbedding {
  std::vector<std::string> node_ids;
  Eigen::MatrixXd f;
  Eigen::MatrixXd f_hat;
};

NamedEmbedding read_embedding(const std::string& path);

}  // namespace gemd
