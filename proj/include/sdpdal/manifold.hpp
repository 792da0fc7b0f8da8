#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "sdpdal/sym_matrix.hpp"

namespace sdpdal {

/// Feasible-set structure D = {X >= 0, B(X) = b0} realized as the factor
/// manifold M = {R : B(R^T R) = b0}. Three variants:
///   FrobSphere        tr X = tau      <=>  ||R||_F = sqrt(tau)
///   Oblique           diag X = e      <=>  unit columns
///   BlockOrthonormal  X_jj = I_{d_j}  <=>  orthonormal column blocks
struct ManifoldDescriptor {
  enum class Kind { FrobSphere, Oblique, BlockOrthonormal };

  Kind kind = Kind::FrobSphere;
  int n = 0;
  double trace_target = 1.0;     // FrobSphere only
  std::vector<int> block_sizes;  // BlockOrthonormal only

  static ManifoldDescriptor frob_sphere(int n, double trace_target = 1.0);
  static ManifoldDescriptor oblique(int n);
  static ManifoldDescriptor block_orthonormal(std::vector<int> block_sizes);

  int m0() const;
  Vector b0() const;
  int max_block() const;
  /// max_{X in D} tr X
  double diameter() const;
  /// ||B(R^T R) - b0||_inf
  double feasibility_error(const FactorMatrix& r) const;
  /// B(R^T U + U^T R); zero iff U is tangent at R.
  Vector tangency_residual(const FactorMatrix& r, const FactorMatrix& u) const;
};

FactorMatrix random_point(const ManifoldDescriptor& desc, int p, std::uint64_t seed);

FactorMatrix project_tangent(const ManifoldDescriptor& desc, const FactorMatrix& r,
                             const FactorMatrix& v);

/// Metric-projection retraction (global/per-column normalization, per-block
/// polar). Returns nullopt on a degenerate block so the caller can shrink
/// the step.
std::optional<FactorMatrix> retract(const ManifoldDescriptor& desc, const FactorMatrix& r,
                                    const FactorMatrix& u);

/// Factorizations of the u-equation operator at a point R, shared between
/// the gradient u-solve and the Hessian u'-solves at the same R.
struct USolveCache {
  double tr_x = 0.0;                         // FrobSphere
  Vector diag_x;                             // Oblique
  std::vector<Eigen::MatrixXd> block_evecs;  // BlockOrthonormal
  std::vector<Eigen::VectorXd> block_evals;
};

USolveCache make_usolve_cache(const ManifoldDescriptor& desc, const FactorMatrix& r);

/// Solves B(X(M - B*(u))) = 0 for u given RM = R * M (factored access to
/// X M = R^T RM). Throws on a numerically singular block system.
Vector solve_u(const ManifoldDescriptor& desc, const USolveCache& cache, const FactorMatrix& r,
               const FactorMatrix& rm);

/// M * B*(u) for a p x n factor M.
FactorMatrix bstar_times_factor(const ManifoldDescriptor& desc, const Vector& u,
                                const FactorMatrix& m);
Vector bstar_matvec(const ManifoldDescriptor& desc, const Vector& u, const Vector& v);
void bstar_add_dense(const ManifoldDescriptor& desc, const Vector& u, Matrix& acc,
                     double scale = 1.0);
double b0_dot(const ManifoldDescriptor& desc, const Vector& u);

/// grad Psi = eucl_grad - 2 R B*(u) with eucl_grad = 2 R gradPhi; equals 2RS.
FactorMatrix riem_grad(const ManifoldDescriptor& desc, const FactorMatrix& r,
                       const FactorMatrix& eucl_grad, const Vector& u);

/// One generalized Riemannian Hessian element applied to a tangent U:
///   P_T[ 2 U gradPhi + 2 R hessPhi[D] - 2 R B*(u') - 2 U B*(u) ],
/// D = U^T R + R^T U, u' solving B(X(hessPhi[D] - B*(u'))) = 0. Inputs are
/// the factored actions U*gradPhi and R*hessPhi[D].
FactorMatrix riem_hess_vec(const ManifoldDescriptor& desc, const USolveCache& cache,
                           const FactorMatrix& r, const FactorMatrix& u_tangent,
                           const FactorMatrix& u_gradphi, const FactorMatrix& r_hessphi_d,
                           const Vector& u_mult);

}  // namespace sdpdal
