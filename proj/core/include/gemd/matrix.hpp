#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace gemd {

enum class ProximityKind {
  adjacency,
  laplacian,
  transition,
  fst,
  ist,
  fsmt,
  estimated_fst,
  estimated_fsmt,
};

const char* to_string(ProximityKind kind);

struct ProximityParams {
  int steps = 0;      // L
  double alpha = 0.0;
  double p = 1.0;
  double q = 1.0;
  int trials = 0;     // m
};

using SparseRM = Eigen::SparseMatrix<double, Eigen::RowMajor>;

// N x N node-proximity matrix tagged with how it was built. Storage is dense
// or sparse depending on the builder; consumers go through the accessors.
class ProximityMatrix {
 public:
  ProximityMatrix() = default;
  ProximityMatrix(SparseRM m, ProximityKind kind, ProximityParams params = {})
      : sparse_(std::move(m)), kind_(kind), params_(params), dense_storage_(false) {
    sparse_.makeCompressed();
  }
  ProximityMatrix(Eigen::MatrixXd m, ProximityKind kind, ProximityParams params = {})
      : dense_(std::move(m)), kind_(kind), params_(params), dense_storage_(true) {}

  Eigen::Index rows() const { return dense_storage_ ? dense_.rows() : sparse_.rows(); }
  Eigen::Index cols() const { return dense_storage_ ? dense_.cols() : sparse_.cols(); }
  bool is_dense() const noexcept { return dense_storage_; }
  ProximityKind kind() const noexcept { return kind_; }
  const ProximityParams& params() const noexcept { return params_; }

  const SparseRM& sparse() const {
    if (dense_storage_) throw std::logic_error("proximity matrix stored dense");
    return sparse_;
  }
  const Eigen::MatrixXd& dense() const {
    if (!dense_storage_) throw std::logic_error("proximity matrix stored sparse");
    return dense_;
  }
  Eigen::MatrixXd to_dense() const {
    return dense_storage_ ? dense_ : Eigen::MatrixXd(sparse_);
  }

  double coeff(Eigen::Index i, Eigen::Index j) const {
    return dense_storage_ ? dense_(i, j) : sparse_.coeff(i, j);
  }

  // Entries that are numerically non-zero (explicit zeros do not count).
  std::size_t nonzero_count() const;
  Eigen::VectorXd row_sums() const;

  // Calls f(i, j, value) for every numerically non-zero entry.
  template <class F>
  void for_each_nonzero(F&& f) const {
    if (dense_storage_) {
      for (Eigen::Index i = 0; i < dense_.rows(); ++i)
        for (Eigen::Index j = 0; j < dense_.cols(); ++j)
          if (dense_(i, j) != 0.0) f(i, j, dense_(i, j));
    } else {
      for (Eigen::Index i = 0; i < sparse_.outerSize(); ++i)
        for (SparseRM::InnerIterator it(sparse_, i); it; ++it)
          if (it.value() != 0.0) f(it.row(), it.col(), it.value());
    }
  }

  // Sparse triple dump `i<TAB>j<TAB>value`, one line per non-zero.
  void dump_triples(const std::string& path) const;

 private:
  SparseRM sparse_;
  Eigen::MatrixXd dense_;
  ProximityKind kind_ = ProximityKind::adjacency;
  ProximityParams params_;
  bool dense_storage_ = false;
};

}  // namespace gemd
