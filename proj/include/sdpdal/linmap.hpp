#pragma once

#include <utility>
#include <vector>

#include "sdpdal/sym_matrix.hpp"

namespace sdpdal {

/// Linear map A : S^n -> R^m given by symmetric coefficient matrices or one
/// of the structured extractors. Component i is tr(A_i X). An off-diagonal
/// entry constraint "X_ij = v" uses the coefficient 0.5(E_ij + E_ji) so that
/// tr(A X) = X_ij and the adjoint stays consistent.
class SymLinearMap {
 public:
  enum class Kind { General, Diag, Trace, Entries, BlockIdentity };

  SymLinearMap() = default;

  static SymLinearMap empty(int n);
  static SymLinearMap diag(int n);
  static SymLinearMap trace(int n);
  static SymLinearMap entries(int n, std::vector<std::pair<int, int>> idx);
  static SymLinearMap general(int n, std::vector<SymMatrix> mats);
  /// Partition 0 = i_0 < ... < i_q = n given by block sizes d_j; one output
  /// per lower-triangle entry of each diagonal block, block-major and
  /// row-major within a block.
  static SymLinearMap block_identity(int n, std::vector<int> block_sizes);

  Kind kind() const { return kind_; }
  int n() const { return n_; }
  int m() const { return m_; }
  const std::vector<SymMatrix>& matrices() const { return mats_; }
  const std::vector<std::pair<int, int>>& index_pairs() const { return idx_; }

  Vector apply(const SymMatrix& x) const;
  Vector apply_dense(const Matrix& x) const;
  /// A(R^T R) without forming R^T R.
  Vector apply_factored(const FactorMatrix& r) const;
  /// A(U^T V + V^T U) for p x n factors, without forming the n x n argument.
  Vector apply_factored_sym(const FactorMatrix& u, const FactorMatrix& v) const;

  SymMatrix adjoint(const Vector& y) const;
  /// M * A*(y) for a p x n factor M, avoiding the n x n intermediate.
  FactorMatrix adjoint_times_factor(const Vector& y, const FactorMatrix& m) const;
  /// A*(y) * v
  Vector adjoint_matvec(const Vector& y, const Vector& v) const;
  void adjoint_add_dense(const Vector& y, Matrix& acc, double scale = 1.0) const;

  /// Total stored nonzeros across coefficient matrices (density heuristics).
  long total_nnz() const;

 private:
  Kind kind_ = Kind::General;
  int n_ = 0;
  int m_ = 0;
  std::vector<SymMatrix> mats_;                // General
  std::vector<std::pair<int, int>> idx_;       // Entries (i >= j)
  std::vector<int> blocks_;                    // BlockIdentity sizes
  void check_n(int n) const;
};

}  // namespace sdpdal
