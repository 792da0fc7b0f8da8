#pragma once

#include <cstdint>
#include <functional>

#include "sdpdal/sym_matrix.hpp"

namespace sdpdal {

using MatVec = std::function<Vector(const Vector&)>;

struct EigBounds {
  double lambda_min = 0.0;
  Vector min_vector;       // unit eigenvector estimate for lambda_min
  double neg_part_norm = 0.0;  // ||P_{>=0}(-S)||_F = Frobenius norm of the negative part
  bool exact = false;          // dense eigensolve vs Lanczos estimate
};

/// Dense symmetric eigen summary (exact).
EigBounds dense_eig_bounds(const Matrix& s);

/// Lanczos with full reorthogonalization on a matvec; estimates the extreme
/// eigenpair and (coarsely) the negative spectrum mass.
EigBounds lanczos_eig_bounds(const MatVec& apply, int n, int max_iters, std::uint64_t seed);

/// Count of singular values > tol * sigma_max.
int numerical_rank(const Matrix& r, double rel_tol = 1e-8);

}  // namespace sdpdal
