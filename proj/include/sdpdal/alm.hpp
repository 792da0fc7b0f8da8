#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "sdpdal/newton.hpp"

namespace sdpdal {

struct SolveOptions {
  double eps_tol = 5e-6;      // overall KKT tolerance on eta_max
  double eps_k_factor = 0.3;  // inner tolerance: max(eps_tol/10, factor * eta_prev)
  double eps_k_floor = 1e-9;
  double sigma0 = 1.0;        // scaled by 1/(1 + ||b||_inf) at startup
  double sigma_growth = 1.1;
  double infeas_drop = 0.9;   // "significant" infeasibility decrease factor
  double alpha = 1.0;         // ALM step size, in [1, (1+sqrt(5))/2)
  int max_outer = 300;
  bool enable_rank_escape = true;
  bool compute_certificates = true;
  int dense_eig_cap = 500;    // dense eigensolve for S up to this n
  std::uint64_t seed = 0;
  NewtonOptions newton;

  void validate() const;
};

struct KktReport {
  double eta_p = 0.0;
  double eta_z = 0.0;
  double eta_d = 0.0;
  double eta_k = 0.0;
  double eta_kstar = 0.0;
  double eta_c1 = 0.0;
  std::optional<double> eta_g;   // absent for nonconvex (entropy) runs
  std::optional<double> eta_c2;  // indicator-h problems only
  std::optional<double> eta_c3;  // inequality-constrained problems only
  double eta_max = 0.0;
  double obj_p = 0.0;
  std::optional<double> obj_d;
  double lambda_min_s = 0.0;
  double s_norm = 0.0;
  int rank = 0;
  bool eig_exact = true;
  // Identity diagnostics: the u-equation residual ||B(sym(X S))||_inf and
  // <grad Psi, R> = 2 <X, S> (zero when I lies in span(B)).
  double bxs_residual = 0.0;
  double grad_r_inner = 0.0;
  double grad_norm = 0.0;
};

/// Prop. 3.4 bound on Psi - min Psi from the gradient norm and the negative
/// part of S; the refined form drops the gradient term when I is in span(B)
/// (true for all three manifold variants).
struct GapCertificate {
  double eps_g = 0.0;
  double eps_h = 0.0;
  double diameter = 0.0;
  bool refinement = false;
  double bound_full = 0.0;
  double bound_refined = 0.0;
  double bound() const { return refinement ? bound_refined : bound_full; }
};

struct Solution {
  FactorMatrix r;
  Matrix x, w, z, s;  // dense copies when available (empty otherwise)
  Vector y, y_ineq, u;
  KktReport report;
  bool converged = false;
  int outer_iters = 0;
  int inner_iters = 0;
  int cg_iters = 0;
  int p_final = 0;
  int rank_escapes = 0;
  bool rank_deficient_certificate = false;
  GapCertificate gap;
  double wall_seconds = 0.0;
  std::vector<KktReport> outer_reports;
  std::vector<std::vector<NewtonTraceEntry>> inner_traces;
  double psi_final = 0.0;  // last subproblem value (certificate audits)
};

/// Algorithm 1.
Solution solve(const SdpProblem& prob, const SolveOptions& opts);

/// KKT residuals of Eq. (4.1)/(4.2) evaluated from raw iterates. S is
/// constructed as grad f - A_E*(y) + A_I*(y_I) - Z - B*(u) with u = u(X), so
/// eta_d = 0 holds by construction; the dense residual is still measured
/// when n is within the dense cap. w/z may be null when h == Zero.
KktReport kkt_report(const SdpProblem& prob, const FactorMatrix& r, const Matrix* w,
                     const Vector& y, const Vector& y_ineq, const Matrix* z,
                     const SolveOptions& opts);

struct DualObjective {
  std::optional<double> value;  // absent for nonconvex runs
  double conj_violation = 0.0;  // dom(h*) violation magnitude
};
DualObjective dual_objective(const SdpProblem& prob, const Vector& y, const Vector& y_ineq,
                             const Matrix* z, const Vector& u, const FactorMatrix& r,
                             const Matrix* x);

/// sigma grows by sigma_growth when max(eta_p, eta_Z) did not drop below
/// infeas_drop times the previous value; alpha held fixed.
std::pair<double, double> sigma_alpha_update(double infeas_prev, double infeas_now, double sigma,
                                             double alpha, const SolveOptions& opts);

GapCertificate gap_certificate(const ManifoldDescriptor& desc, double grad_norm,
                               double lambda_min_s);

}  // namespace sdpdal
