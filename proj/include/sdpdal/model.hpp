#pragma once

#include <optional>
#include <utility>

#include "sdpdal/linmap.hpp"
#include "sdpdal/manifold.hpp"
#include "sdpdal/prox.hpp"

namespace sdpdal {

enum class EntropyKind { None, Tsallis2, Renyi3 };

/// Smooth objective oracle f. Linear terms keep C sparse plus optional
/// rank-one pieces sum_k s_k w_k w_k^T that are never materialized (the theta
/// objective -ee^T lives here).
class SmoothOracle {
 public:
  enum class Kind { Linear, WeightedQuad, LinearPlusEntropy };

  static SmoothOracle linear(SymMatrix c);
  static SmoothOracle linear_rank_one(int n, double scale, Vector w);
  static SmoothOracle weighted_quad(SymMatrix h_weights, SymMatrix g_data);
  static SmoothOracle linear_plus_entropy(SymMatrix c, EntropyKind kind, double lambda_ent);

  Kind kind() const { return kind_; }
  int n() const { return n_; }
  bool is_convex() const { return kind_ != Kind::LinearPlusEntropy || ent_lambda_ == 0.0; }
  EntropyKind entropy_kind() const { return ent_; }
  double entropy_lambda() const { return ent_lambda_; }
  const SymMatrix& c() const { return c_; }
  const std::vector<std::pair<double, Vector>>& rank_one() const { return rank1_; }
  const SymMatrix& h_weights() const { return hw_; }
  const SymMatrix& g_data() const { return g_; }

  /// f(R^T R); X passed when the caller already has it.
  double value(const FactorMatrix& r, const Matrix* x) const;
  /// M * grad f(X) for a p x n factor M (M is R or a tangent U).
  FactorMatrix times_grad(const FactorMatrix& m, const FactorMatrix& r, const Matrix* x) const;
  /// R * hess f(X)[D] with D = U^T R + R^T U (D passed dense when available).
  FactorMatrix r_times_hess(const FactorMatrix& r, const FactorMatrix& u, const Matrix* x,
                            const Matrix* d) const;
  /// grad f(X) * v
  Vector grad_matvec(const Vector& v, const FactorMatrix& r, const Matrix* x) const;
  void grad_add_dense(Matrix& acc, const FactorMatrix& r, const Matrix* x) const;
  Matrix grad_dense(const FactorMatrix& r, const Matrix* x) const;

 private:
  Kind kind_ = Kind::Linear;
  int n_ = 0;
  SymMatrix c_;
  std::vector<std::pair<double, Vector>> rank1_;
  SymMatrix hw_, g_;
  Matrix hw2_;  // H o H, cached dense
  EntropyKind ent_ = EntropyKind::None;
  double ent_lambda_ = 0.0;
};

/// Entropy penalty on the normalized spectrum of X = R^T R, computed on the
/// p x p Gram matrix R R^T. Returns the value and the gradient wrt R.
std::pair<double, FactorMatrix> entropy_value_grad(EntropyKind kind, double lambda_ent,
                                                   const FactorMatrix& r);

struct SdpProblem {
  SmoothOracle f;
  ProxOracle h;
  SymLinearMap eq;   // A_E, may have m = 0
  Vector b;
  SymLinearMap ineq;  // A_I with convention A_I(X) <= b_I, may have m = 0
  Vector b_ineq;
  ManifoldDescriptor manifold;
  int p = 0;
  bool needs_explicit_x = false;

  static SdpProblem make(SmoothOracle f, ProxOracle h, SymLinearMap eq, Vector b,
                         SymLinearMap ineq, Vector b_ineq, ManifoldDescriptor manifold, int p);
  int n() const { return manifold.n; }
  int m() const { return eq.m(); }
  int m_ineq() const { return ineq.m(); }
};

/// Multipliers and penalty weight of one ALM outer iteration. y_I >= 0.
struct AlmContext {
  Vector y;
  Vector y_ineq;
  Matrix z;  // empty when h == Zero (Z stays identically zero)
  double sigma = 1.0;

  static AlmContext initial(const SdpProblem& prob, double sigma);
  bool has_z() const { return z.size() > 0; }
};

/// Everything evaluated once per point R and reused by Hessian products and
/// the KKT report.
struct PsiCache {
  double value = 0.0;
  double f_value = 0.0;
  double h_value = 0.0;      // h(W)
  Matrix x;                  // explicit X (empty on the factored-only path)
  Matrix w;                  // prox output (explicit path, h != Zero)
  Matrix sigma_t;            // sigma * T(X)
  Matrix t_mask;             // dT mask
  Vector eq_resid;           // A_E(X) - b - y/sigma
  Vector ineq_val;           // A_I(X) - b_I + y_I/sigma
  Vector ineq_plus;          // max(ineq_val, 0)
  Vector ineq_mask;          // 1 where ineq_val >= 0
  FactorMatrix r_gradphi;    // R * gradPhi
  Vector u;                  // manifold multiplier u(X)
  USolveCache ucache;
  FactorMatrix grad;         // grad Psi = 2 R S
};

/// Psi_k value, Euclidean gradient pieces, u, S and grad Psi at R.
PsiCache psi_eval(const SdpProblem& prob, const AlmContext& ctx, const FactorMatrix& r);

/// M * gradPhi for M = R or a tangent U, from cached residuals.
FactorMatrix times_gradphi(const SdpProblem& prob, const AlmContext& ctx, const PsiCache& cache,
                           const FactorMatrix& m, const FactorMatrix& r);

/// One generalized Riemannian Hessian element applied to a tangent U.
FactorMatrix psi_hess_vec(const SdpProblem& prob, const AlmContext& ctx, const PsiCache& cache,
                          const FactorMatrix& r, const FactorMatrix& u);

/// gradPhi * v (for spectral estimates of S).
Vector gradphi_matvec(const SdpProblem& prob, const AlmContext& ctx, const PsiCache& cache,
                      const FactorMatrix& r, const Vector& v);
Matrix gradphi_dense(const SdpProblem& prob, const AlmContext& ctx, const PsiCache& cache,
                     const FactorMatrix& r);

/// S = gradPhi - B*(u) as a matvec or dense matrix.
Vector s_matvec(const SdpProblem& prob, const AlmContext& ctx, const PsiCache& cache,
                const FactorMatrix& r, const Vector& v);
Matrix s_dense(const SdpProblem& prob, const AlmContext& ctx, const PsiCache& cache,
               const FactorMatrix& r);

}  // namespace sdpdal
