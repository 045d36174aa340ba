#include "gemd/solver.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "gemd/rng.hpp"

namespace gemd {

namespace {

// Widening the sample to the full small dimension makes the factorization
// exact there; above it the (oversample, power_iterations) sketch applies.
constexpr Eigen::Index kExactCaptureDim = 64;

Eigen::MatrixXd thin_q(const Eigen::MatrixXd& y) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(y);
  return qr.householderQ() * Eigen::MatrixXd::Identity(y.rows(), y.cols());
}

template <class Mat>
TruncatedSvd truncated_svd_impl(const Mat& a, int k, const SvdOptions& opt) {
  const Eigen::Index rows = a.rows(), cols = a.cols();
  const Eigen::Index mindim = std::min(rows, cols);
  if (k < 1 || k > mindim)
    throw std::invalid_argument("truncated_svd: k must lie in [1, min(rows, cols)]");

  Eigen::Index r = std::min<Eigen::Index>(k + std::max(0, opt.oversample), mindim);
  if (mindim <= kExactCaptureDim) r = mindim;

  CounterRng rng(opt.seed, 0x5fd1);
  Eigen::MatrixXd omega(cols, r);
  for (Eigen::Index j = 0; j < r; ++j)
    for (Eigen::Index i = 0; i < cols; ++i) omega(i, j) = rng.next_gaussian();

  Eigen::MatrixXd q = thin_q(a * omega);
  if (r < mindim) {
    for (int it = 0; it < opt.power_iterations; ++it) {
      const Eigen::MatrixXd z = thin_q(a.transpose() * q);
      q = thin_q(a * z);
    }
  }

  const Eigen::MatrixXd b = q.transpose() * a;  // r x cols
  Eigen::BDCSVD<Eigen::MatrixXd> svd(b, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success)
    throw std::runtime_error("truncated_svd: core SVD did not converge");

  TruncatedSvd out;
  out.u = q * svd.matrixU().leftCols(k);
  out.values = svd.singularValues().head(k);
  out.v = svd.matrixV().leftCols(k);

  // Sign convention: largest-magnitude entry of each left vector positive.
  for (int j = 0; j < k; ++j) {
    Eigen::Index idx = 0;
    out.u.col(j).cwiseAbs().maxCoeff(&idx);
    if (out.u(idx, j) < 0.0) {
      out.u.col(j) = -out.u.col(j);
      out.v.col(j) = -out.v.col(j);
    }
  }
  return out;
}

}  // namespace

TruncatedSvd truncated_svd(const Eigen::MatrixXd& a, int k, const SvdOptions& opt) {
  return truncated_svd_impl(a, k, opt);
}

TruncatedSvd truncated_svd(const SparseRM& a, int k, const SvdOptions& opt) {
  return truncated_svd_impl(a, k, opt);
}

Eigen::MatrixXd warped_inverse(const ProximityMatrix& pi, const WarpSpec& spec) {
  Eigen::MatrixXd z = Eigen::MatrixXd::Constant(pi.rows(), pi.cols(), unwarp_floor(spec));
  pi.for_each_nonzero(
      [&z, &spec](Eigen::Index i, Eigen::Index j, double v) { z(i, j) = unwarp(spec, v); });
  return z;
}

EmbeddingPair warped_frobenius_solve(const ProximityMatrix& pi, const WarpSpec& spec, int k,
                                     const SvdOptions& opt) {
  if (k < 1 || k > std::min(pi.rows(), pi.cols()))
    throw std::invalid_argument("warped_frobenius_solve: k must lie in [1, N]");
  const Eigen::MatrixXd z = warped_inverse(pi, spec);
  TruncatedSvd svd = truncated_svd(z, k, opt);
  const Eigen::VectorXd root = svd.values.cwiseMax(0.0).cwiseSqrt();
  EmbeddingPair pair;
  pair.f = svd.u * root.asDiagonal();
  pair.f_hat = svd.v * root.asDiagonal();
  pair.singular_values = std::move(svd.values);
  return pair;
}

namespace {

Eigen::VectorXd checked_row_sums(const ProximityMatrix& pi) {
  Eigen::VectorXd sums = pi.row_sums();
  for (Eigen::Index i = 0; i < sums.size(); ++i)
    if (!(sums(i) > 0.0))
      throw std::invalid_argument("kl loss: row " + std::to_string(i) +
                                  " of the proximity matrix has zero sum");
  return sums;
}

// Log-space row normalizer so large inner products cannot overflow exp.
double row_logsumexp(const Eigen::VectorXd& x) {
  const double m = x.maxCoeff();
  double s = 0.0;
  for (Eigen::Index j = 0; j < x.size(); ++j) s += std::exp(x(j) - m);
  return m + std::log(s);
}

}  // namespace

double kl_loss(const ProximityMatrix& pi, const EmbeddingPair& pair, const WarpSpec& spec) {
  const Eigen::Index n = pi.rows();
  if (pair.f.rows() != n || pair.f_hat.rows() != n)
    throw std::invalid_argument("kl_loss: embedding size does not match the matrix");
  const bool exp_family = spec.family == WarpFamily::ibc && spec.gamma == 0.0;
  if (!exp_family && spec.family != WarpFamily::sigmoid)
    throw std::invalid_argument("kl_loss: supported warps are exponential and sigmoid");

  const Eigen::VectorXd pi_sums = checked_row_sums(pi);
  const Eigen::MatrixXd pi_dense = pi.to_dense();

  double loss = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::VectorXd x = pair.f_hat * pair.f.row(i).transpose();
    double row_loss = 0.0;
    if (exp_family) {
      const double lse = row_logsumexp(x);
      for (Eigen::Index j = 0; j < n; ++j) {
        const double v = pi_dense(i, j);
        if (v == 0.0) continue;
        const double pt = v / pi_sums(i);
        row_loss += pt * (std::log(pt) - x(j) + lse);
      }
    } else {
      Eigen::VectorXd y(n);
      for (Eigen::Index j = 0; j < n; ++j) y(j) = 1.0 / (1.0 + std::exp(-x(j)));
      const double ysum = y.sum();
      for (Eigen::Index j = 0; j < n; ++j) {
        const double v = pi_dense(i, j);
        if (v == 0.0) continue;
        const double pt = v / pi_sums(i);
        row_loss += pt * (std::log(pt) - std::log(y(j) / ysum));
      }
    }
    loss += row_loss;
  }
  return loss;
}

namespace {

// Loss and d(loss)/d(X) for X = F F_hat^T under the row-normalized KL.
double kl_loss_and_grad(const Eigen::MatrixXd& pi_dense, const Eigen::VectorXd& pi_sums,
                        const Eigen::MatrixXd& x, bool exp_family, Eigen::MatrixXd& grad) {
  const Eigen::Index n = pi_dense.rows();
  grad.resize(n, n);
  double loss = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (exp_family) {
      const double lse = row_logsumexp(x.row(i).transpose());
      for (Eigen::Index j = 0; j < n; ++j) {
        const double pt = pi_dense(i, j) / pi_sums(i);
        const double yt = std::exp(x(i, j) - lse);
        grad(i, j) = yt - pt;
        if (pt > 0.0) loss += pt * (std::log(pt) - x(i, j) + lse);
      }
    } else {
      double ysum = 0.0;
      for (Eigen::Index j = 0; j < n; ++j) ysum += 1.0 / (1.0 + std::exp(-x(i, j)));
      for (Eigen::Index j = 0; j < n; ++j) {
        const double y = 1.0 / (1.0 + std::exp(-x(i, j)));
        const double pt = pi_dense(i, j) / pi_sums(i);
        grad(i, j) = (1.0 - y) * (y / ysum - pt);
        if (pt > 0.0) loss += pt * (std::log(pt) - std::log(y / ysum));
      }
    }
  }
  return loss;
}

}  // namespace

EmbeddingPair kl_descent(const ProximityMatrix& pi, const WarpSpec& spec, int k,
                         const KlDescentConfig& cfg) {
  const Eigen::Index n = pi.rows();
  if (k < 1 || k > n) throw std::invalid_argument("kl_descent: k must lie in [1, N]");
  if (!(cfg.step > 0.0)) throw std::invalid_argument("kl_descent: step must be positive");
  if (!(cfg.tolerance > 0.0)) throw std::invalid_argument("kl_descent: tolerance must be positive");
  const bool exp_family = spec.family == WarpFamily::ibc && spec.gamma == 0.0;
  if (!exp_family && spec.family != WarpFamily::sigmoid)
    throw std::invalid_argument(
        "kl_descent: closed-form gradients need the exponential or sigmoid warp");

  const Eigen::VectorXd pi_sums = checked_row_sums(pi);
  const Eigen::MatrixXd pi_dense = pi.to_dense();

  CounterRng rng(cfg.seed, 0x4b1d);
  const double scale = 0.1 / std::sqrt(static_cast<double>(k));
  Eigen::MatrixXd f(n, k), f_hat(n, k);
  for (Eigen::Index j = 0; j < k; ++j)
    for (Eigen::Index i = 0; i < n; ++i) f(i, j) = scale * rng.next_gaussian();
  for (Eigen::Index j = 0; j < k; ++j)
    for (Eigen::Index i = 0; i < n; ++i) f_hat(i, j) = scale * rng.next_gaussian();

  Eigen::MatrixXd grad;
  Eigen::MatrixXd x = f * f_hat.transpose();
  double loss = kl_loss_and_grad(pi_dense, pi_sums, x, exp_family, grad);
  if (!std::isfinite(loss))
    throw std::runtime_error("kl_descent: non-finite loss at initialization");

  Eigen::MatrixXd best_f = f, best_f_hat = f_hat;
  double best_loss = loss;
  double step = cfg.step;

  for (int it = 0; it < cfg.max_iterations; ++it) {
    const Eigen::MatrixXd gf = grad * f_hat;
    const Eigen::MatrixXd gf_hat = grad.transpose() * f;

    double trial_loss = std::numeric_limits<double>::infinity();
    Eigen::MatrixXd tf, tf_hat, tgrad;
    bool accepted = false;
    for (int halvings = 0; halvings < 60; ++halvings) {
      tf = f - step * gf;
      tf_hat = f_hat - step * gf_hat;
      x = tf * tf_hat.transpose();
      trial_loss = kl_loss_and_grad(pi_dense, pi_sums, x, exp_family, tgrad);
      if (std::isfinite(trial_loss) && trial_loss <= loss) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      if (!std::isfinite(trial_loss)) {
        char buf[48];
        std::snprintf(buf, sizeof(buf), "%g", step);
        throw std::runtime_error("kl_descent: loss became non-finite at iteration " +
                                 std::to_string(it) + " with step " + buf);
      }
      break;  // no descent progress at the smallest step
    }

    const double change = loss - trial_loss;
    f = std::move(tf);
    f_hat = std::move(tf_hat);
    grad = std::move(tgrad);
    loss = trial_loss;
    if (loss < best_loss) {
      best_loss = loss;
      best_f = f;
      best_f_hat = f_hat;
    }
    if (change < cfg.tolerance * std::max(1.0, std::abs(loss))) break;
    step *= 1.2;
  }

  EmbeddingPair pair;
  pair.f = std::move(best_f);
  pair.f_hat = std::move(best_f_hat);
  return pair;
}

namespace {

std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace

void write_embedding(const std::string& path, const std::vector<std::string>& node_ids,
                     const EmbeddingPair& pair) {
  const Eigen::Index n = pair.f.rows();
  if (static_cast<Eigen::Index>(node_ids.size()) != n)
    throw std::invalid_argument("write_embedding: id count does not match embedding rows");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  const int k = pair.dim();
  out << "node";
  for (int j = 1; j <= k; ++j) out << "\tf_" << j;
  for (int j = 1; j <= k; ++j) out << "\tfhat_" << j;
  out << '\n';
  for (Eigen::Index i = 0; i < n; ++i) {
    out << node_ids[i];
    for (int j = 0; j < k; ++j) out << '\t' << format_double(pair.f(i, j));
    for (int j = 0; j < k; ++j) out << '\t' << format_double(pair.f_hat(i, j));
    out << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

NamedEmbedding read_embedding(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open embedding file: " + path);
  std::string header;
  if (!std::getline(in, header)) throw std::runtime_error("empty embedding file: " + path);
  int k = 0;
  {
    std::stringstream ss(header);
    std::string col;
    int f_cols = 0, fhat_cols = 0;
    bool first = true;
    while (std::getline(ss, col, '\t')) {
      if (first) {
        if (col != "node") throw std::runtime_error("bad embedding header: " + path);
        first = false;
      } else if (col.rfind("fhat_", 0) == 0) {
        ++fhat_cols;
      } else if (col.rfind("f_", 0) == 0) {
        ++f_cols;
      }
    }
    if (f_cols == 0 || f_cols != fhat_cols)
      throw std::runtime_error("bad embedding header: " + path);
    k = f_cols;
  }
  NamedEmbedding emb;
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string field;
    if (!std::getline(ss, field, '\t'))
      throw std::runtime_error("bad row in embedding file " + path + " line " +
                               std::to_string(line_no));
    emb.node_ids.push_back(field);
    std::vector<double> vals;
    vals.reserve(2 * k);
    while (std::getline(ss, field, '\t')) {
      double v = 0.0;
      auto [p, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
      if (ec != std::errc() || p != field.data() + field.size())
        throw std::runtime_error("bad value in embedding file " + path + " line " +
                                 std::to_string(line_no));
      vals.push_back(v);
    }
    if (static_cast<int>(vals.size()) != 2 * k)
      throw std::runtime_error("wrong column count in embedding file " + path + " line " +
                               std::to_string(line_no));
    rows.push_back(std::move(vals));
  }
  const Eigen::Index n = static_cast<Eigen::Index>(rows.size());
  emb.f.resize(n, k);
  emb.f_hat.resize(n, k);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (int j = 0; j < k; ++j) {
      emb.f(i, j) = rows[i][j];
      emb.f_hat(i, j) = rows[i][k + j];
    }
  }
  return emb;
}

}  // namespace gemd
