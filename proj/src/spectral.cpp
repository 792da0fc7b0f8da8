#include "sdpdal/spectral.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <random>

namespace sdpdal {

EigBounds dense_eig_bounds(const Matrix& s) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (s + s.transpose()));
  EigBounds out;
  const Vector& lam = es.eigenvalues();
  out.lambda_min = lam[0];
  out.min_vector = es.eigenvectors().col(0);
  out.neg_part_norm = std::sqrt(lam.array().min(0.0).square().sum());
  out.exact = true;
  return out;
}

EigBounds lanczos_eig_bounds(const MatVec& apply, int n, int max_iters, std::uint64_t seed) {
  const int k = std::min(n, max_iters);
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vector q = Vector::NullaryExpr(n, [&](Eigen::Index) { return gauss(gen); });
  q.normalize();

  Matrix basis(n, k);
  Vector alpha(k), beta(k);
  Vector q_prev = Vector::Zero(n);
  double beta_prev = 0.0;
  int steps = 0;
  for (int j = 0; j < k; ++j) {
    basis.col(j) = q;
    Vector w = apply(q);
    alpha[j] = q.dot(w);
    w -= alpha[j] * q + beta_prev * q_prev;
    // Full reorthogonalization keeps the small Krylov basis clean.
    w -= basis.leftCols(j + 1) * (basis.leftCols(j + 1).transpose() * w);
    beta_prev = w.norm();
    steps = j + 1;
    if (beta_prev < 1e-12) break;
    beta[j] = beta_prev;
    q_prev = basis.col(j);
    q = w / beta_prev;
  }

  Matrix t = Matrix::Zero(steps, steps);
  for (int j = 0; j < steps; ++j) {
    t(j, j) = alpha[j];
    if (j + 1 < steps) {
      t(j, j + 1) = beta[j];
      t(j + 1, j) = beta[j];
    }
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(t);
  EigBounds out;
  const Vector& lam = es.eigenvalues();
  out.lambda_min = lam[0];
  out.min_vector = basis.leftCols(steps) * es.eigenvectors().col(0);
  out.min_vector.normalize();
  out.neg_part_norm = std::sqrt(lam.array().min(0.0).square().sum());
  out.exact = false;
  return out;
}

int numerical_rank(const Matrix& r, double rel_tol) {
  Eigen::JacobiSVD<Matrix> svd(r);
  const Vector& sv = svd.singularValues();
  if (sv.size() == 0) return 0;
  const double cutoff = rel_tol * sv[0];
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv[i] > cutoff) ++rank;
  return rank;
}

}  // namespace sdpdal
