#pragma once

#include <Eigen/Core>
#include <vector>

namespace sdpdal {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// A factor R is p x n: p rows (factor rank), one column per SDP dimension.
using FactorMatrix = Eigen::MatrixXd;

/// Symmetric n x n matrix, either dense or a canonical lower-triangle
/// coordinate list (i >= j, deduplicated; an off-diagonal entry stands for
/// both (i,j) and (j,i)).
class SymMatrix {
 public:
  struct Entry {
    int i, j;
    double v;
  };

  SymMatrix() = default;

  static SymMatrix zero(int n);
  static SymMatrix identity(int n);
  /// Dense symmetric input; throws if not symmetric up to roundoff.
  static SymMatrix from_dense(const Matrix& a);
  /// Coordinate list in any order/orientation; canonicalized and deduplicated.
  static SymMatrix from_triplets(int n, std::vector<Entry> entries);

  int n() const { return n_; }
  bool is_dense() const { return dense_; }
  int nnz() const { return dense_ ? n_ * n_ : static_cast<int>(coo_.size()); }
  const std::vector<Entry>& entries() const { return coo_; }

  double coeff(int i, int j) const;
  double trace() const;
  double frob_norm() const;
  double max_abs() const;

  Matrix dense() const;
  /// A * v
  Vector matvec(const Vector& v) const;
  /// M * A for a p x n factor M.
  Matrix left_product(const Matrix& m) const;
  /// <A, X> with X dense symmetric.
  double inner_dense(const Matrix& x) const;
  /// <A, R^T R> without forming R^T R.
  double inner_factored(const Matrix& r) const;
  /// acc += scale * A on a dense accumulator.
  void add_to_dense(Matrix& acc, double scale = 1.0) const;

  SymMatrix& operator*=(double s);

 private:
  int n_ = 0;
  bool dense_ = false;
  Matrix d_;
  std::vector<Entry> coo_;
};

}  // namespace sdpdal
