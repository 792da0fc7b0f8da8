#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "sdpdal/model.hpp"

namespace sdpdal {

struct NewtonOptions {
  double eta1 = 0.01;   // accept threshold
  double eta2 = 0.9;    // very-successful threshold
  double gamma0 = 0.2;  // shrink factor
  double gamma1 = 1.0;  // keep factor
  double gamma2 = 10.0; // growth factor
  double nu_min = 1e-3;
  double nu0 = 1.0;
  double theta = 0.1;       // inexactness constant of the residual test
  double mu = 1e-4;         // Armijo slope fraction
  double ls_delta = 0.5;    // backtracking ratio
  int ls_max = 50;          // backtracking cap
  int max_iters = 500;      // K
  int cg_cap = 250;
  double eps_curv = 1e-10;  // relative nonpositive-curvature threshold

  void validate() const;
};

struct NewtonTraceEntry {
  double grad_norm = 0.0;
  double psi = 0.0;
  double nu = 0.0;
  double rho = 0.0;
  double step = 0.0;
  int cg_iters = 0;
  bool accepted = false;
};

enum class McgStatus { Converged, NegativeCurvature, CapReached };

struct McgResult {
  FactorMatrix direction;
  McgStatus status = McgStatus::Converged;
  int iters = 0;
  double quad_curvature = 0.0;  // <U, (H + nu I) U> for the returned U
};

using HessAction = std::function<FactorMatrix(const FactorMatrix&)>;

/// Modified CG on grad + (H + nu I) U = 0 over the tangent space. Stops on
/// the inexactness test ||grad + (H+nu)U|| <= min(theta ||U||, forcing) or on
/// nonpositive curvature (first step: fall back to -grad; later: return the
/// current iterate). The output always satisfies <U, grad> < 0.
McgResult mcg(const FactorMatrix& grad, const HessAction& hess, double nu, double theta,
              double eps_curv, int cap);

/// Smallest h with m(delta^h U) <= mu delta^h <grad m(0), U>; model evaluated
/// from the cached curvature. Returns nullopt when the cap is exhausted.
std::optional<double> armijo_step(double g_dot_u, double u_hu_nu, double mu, double delta,
                                  int cap);

struct RatioUpdate {
  bool accept = false;
  double rho = 0.0;
  double nu_next = 0.0;
};

/// Trust ratio rho = (psi_new - psi_old) / (m(U) - nu/2 ||U||^2) and the
/// three-branch regularization update with deterministic endpoints.
RatioUpdate ratio_and_update(double psi_old, double psi_new, double m_value, double nu,
                             double u_norm_sq, const NewtonOptions& opts);

struct SubproblemResult {
  FactorMatrix r;
  PsiCache cache;  // evaluated at r
  std::vector<NewtonTraceEntry> trace;
  bool converged = false;
  int cg_total = 0;
};

/// Algorithm 2: solve min_{R in M} Psi_k(R) to ||grad Psi|| <= eps_k.
SubproblemResult solve_subproblem(const SdpProblem& prob, const AlmContext& ctx,
                                  const FactorMatrix& r0, double eps_k,
                                  const NewtonOptions& opts);

/// Escape from a rank-constrained stationary point: appends one row along the
/// most-negative eigenvector of S (scaled), retracts, and verifies descent.
/// Returns nullopt when lambda_min >= 0, p is at its cap, or no descent is
/// found.
std::optional<FactorMatrix> rank_escape(const SdpProblem& prob, const AlmContext& ctx,
                                        const FactorMatrix& r, double psi_at_r,
                                        double lambda_min, const Vector& eigvec, int p_max);

}  // namespace sdpdal
