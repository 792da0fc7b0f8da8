#include "sdpdal/alm.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

#include "sdpdal/spectral.hpp"

namespace sdpdal {

namespace {

constexpr double kGolden = 1.6180339887498948;

// Synthetic cache whose gradphi equals the dual matrix
// M = grad f(X) - A_E*(y) + A_I*(y_I) - Z, reusing the model product paths
// (sigma = 1 in the context so the weights pass through unscaled).
struct DualView {
  AlmContext ctx;
  PsiCache cache;
};

DualView make_dual_view(const SdpProblem& prob, const FactorMatrix& r, const Vector& y,
                        const Vector& y_ineq, const Matrix* z) {
  DualView dv;
  dv.ctx.sigma = 1.0;
  dv.ctx.y = Vector::Zero(prob.m());
  dv.ctx.y_ineq = Vector::Zero(prob.m_ineq());
  if (prob.needs_explicit_x) dv.cache.x = r.transpose() * r;
  if (prob.m() > 0) dv.cache.eq_resid = -y;
  if (prob.m_ineq() > 0) {
    dv.cache.ineq_plus = y_ineq;
    dv.cache.ineq_mask = Vector::Zero(prob.m_ineq());
  }
  if (z && z->size() > 0) dv.cache.sigma_t = -*z;
  dv.cache.r_gradphi = times_gradphi(prob, dv.ctx, dv.cache, r, r);
  dv.cache.ucache = make_usolve_cache(prob.manifold, r);
  dv.cache.u = solve_u(prob.manifold, dv.cache.ucache, r, dv.cache.r_gradphi);
  dv.cache.grad = riem_grad(prob.manifold, r, 2.0 * dv.cache.r_gradphi, dv.cache.u);
  return dv;
}

double safe_div(double num, double den) { return num / den; }

}  // namespace

void SolveOptions::validate() const {
  if (!(eps_tol > 0.0)) throw std::invalid_argument("SolveOptions: eps_tol must be positive");
  if (!(sigma0 > 0.0)) throw std::invalid_argument("SolveOptions: sigma0 must be positive");
  if (!(alpha >= 1.0 && alpha < kGolden))
    throw std::invalid_argument("SolveOptions: alpha must lie in [1, (1+sqrt(5))/2)");
  if (max_outer < 1) throw std::invalid_argument("SolveOptions: max_outer must be positive");
  newton.validate();
}

std::pair<double, double> sigma_alpha_update(double infeas_prev, double infeas_now, double sigma,
                                             double alpha, const SolveOptions& opts) {
  if (std::isfinite(infeas_prev) && infeas_now > opts.infeas_drop * infeas_prev)
    sigma *= opts.sigma_growth;
  return {sigma, alpha};
}

GapCertificate gap_certificate(const ManifoldDescriptor& desc, double grad_norm,
                               double lambda_min_s) {
  GapCertificate g;
  g.eps_g = grad_norm;
  g.eps_h = std::max(0.0, -lambda_min_s);
  g.diameter = desc.diameter();
  // I in span(B) for trace, diag and block-identity structures alike.
  g.refinement = true;
  g.bound_full = 0.5 * std::sqrt(g.diameter) * g.eps_g + g.diameter * g.eps_h;
  g.bound_refined = g.diameter * g.eps_h;
  return g;
}

DualObjective dual_objective(const SdpProblem& prob, const Vector& y, const Vector& y_ineq,
                             const Matrix* z, const Vector& u, const FactorMatrix& r,
                             const Matrix* x) {
  DualObjective out;
  if (!prob.f.is_convex()) return out;

  double val = 0.0;
  if (prob.m() > 0) val += y.dot(prob.b);
  if (prob.m_ineq() > 0) val -= y_ineq.dot(prob.b_ineq);
  val += b0_dot(prob.manifold, u);

  if (!prob.h.is_zero()) {
    const Matrix neg_z = z ? Matrix(-*z) : Matrix::Zero(prob.n(), prob.n());
    const auto conj = prob.h.conjugate_value(neg_z);
    out.conj_violation = conj.violation;
    val -= conj.value;
  }

  if (prob.f.kind() == SmoothOracle::Kind::WeightedQuad) {
    // f*(grad f(X)) = <grad f(X), G> + f(X) on the support of H.
    const Matrix grad_f = prob.f.grad_dense(r, x);
    val -= grad_f.cwiseProduct(prob.f.g_data().dense()).sum() + prob.f.value(r, x);
  }
  out.value = val;
  return out;
}

KktReport kkt_report(const SdpProblem& prob, const FactorMatrix& r, const Matrix* w,
                     const Vector& y, const Vector& y_ineq, const Matrix* z,
                     const SolveOptions& opts) {
  KktReport rep;
  const int n = prob.n();
  const DualView dv = make_dual_view(prob, r, y, y_ineq, z);
  const Matrix* xp = dv.cache.x.size() ? &dv.cache.x : nullptr;

  const Matrix gram = r * r.transpose();
  const double x_norm = gram.norm();

  // Primal feasibility.
  double resid_sq = 0.0, b_sq = 0.0;
  if (prob.m() > 0) {
    const Vector ax = xp ? prob.eq.apply_dense(*xp) : prob.eq.apply_factored(r);
    resid_sq += (ax - prob.b).squaredNorm();
    b_sq += prob.b.squaredNorm();
  }
  Vector ineq_resid;
  if (prob.m_ineq() > 0) {
    const Vector ax = xp ? prob.ineq.apply_dense(*xp) : prob.ineq.apply_factored(r);
    ineq_resid = ax - prob.b_ineq;
    resid_sq += ineq_resid.cwiseMax(0.0).squaredNorm();
    b_sq += prob.b_ineq.squaredNorm();
  }
  rep.eta_p = safe_div(std::sqrt(resid_sq), 1.0 + std::sqrt(b_sq));

  // Splitting consistency.
  if (!prob.h.is_zero() && w && w->size() > 0)
    rep.eta_z = safe_div((*xp - *w).norm(), 1.0 + x_norm);

  // Spectral quantities of S.
  const bool dense_path = n <= opts.dense_eig_cap;
  Matrix s_mat;
  EigBounds eig;
  if (dense_path) {
    s_mat = s_dense(prob, dv.ctx, dv.cache, r);
    eig = dense_eig_bounds(s_mat);
    rep.s_norm = s_mat.norm();
  } else {
    eig = lanczos_eig_bounds(
        [&](const Vector& v) { return s_matvec(prob, dv.ctx, dv.cache, r, v); }, n, 60,
        opts.seed + 17);
    // Frobenius mass is not available from a partial spectrum; use the Ritz
    // values as a lower estimate.
    rep.s_norm = std::sqrt(std::max(0.0, eig.lambda_min * eig.lambda_min));
  }
  rep.eig_exact = eig.exact;
  rep.lambda_min_s = eig.lambda_min;
  rep.eta_kstar = safe_div(eig.neg_part_norm, 1.0 + rep.s_norm);

  // Complementarity <X, S> = 0.5 <grad Psi, R>.
  const double xs = 0.5 * (dv.cache.grad.array() * r.array()).sum();
  rep.eta_c1 = safe_div(std::abs(xs), 1.0 + x_norm + rep.s_norm);
  rep.grad_r_inner = 2.0 * xs;
  rep.grad_norm = dv.cache.grad.norm();
  // B(R^T grad + grad^T R) = 4 B(sym(X S)): the u-equation residual.
  rep.bxs_residual =
      0.25 * prob.manifold.tangency_residual(r, dv.cache.grad).cwiseAbs().maxCoeff();

  // eta_K = 0 because X = R^T R; eta_d = 0 by construction of S, but measure
  // the dense residual honestly when affordable.
  rep.eta_k = 0.0;
  double grad_f_norm = 1.0;
  double conj_violation = 0.0;
  if (dense_path) {
    const Matrix grad_f = prob.f.grad_dense(r, xp);
    grad_f_norm = grad_f.norm();
    Matrix resid = grad_f - s_mat;
    if (prob.m() > 0) prob.eq.adjoint_add_dense(y, resid, -1.0);
    if (prob.m_ineq() > 0) prob.ineq.adjoint_add_dense(y_ineq, resid, 1.0);
    if (z && z->size() > 0) resid -= *z;
    bstar_add_dense(prob.manifold, dv.cache.u, resid, -1.0);
    rep.eta_d = safe_div(resid.norm(), 1.0 + grad_f_norm);
  }

  // Objectives and gap.
  rep.obj_p = prob.f.value(r, xp);
  if (prob.h.kind() == ProxOracle::Kind::L1 && xp) rep.obj_p += prob.h.value(*xp);
  const DualObjective dual = dual_objective(prob, y, y_ineq, z, dv.cache.u, r, xp);
  conj_violation = dual.conj_violation;
  rep.eta_d += safe_div(conj_violation, 1.0 + grad_f_norm);
  if (dual.value) {
    rep.obj_d = dual.value;
    rep.eta_g = safe_div(std::abs(rep.obj_p - *rep.obj_d),
                         1.0 + std::abs(rep.obj_p) + std::abs(*rep.obj_d));
  }

  if (prob.h.is_indicator() && z && z->size() > 0 && xp) {
    // Complementarity with the multiplier of X = W; the box set shifts the
    // reference point (<X - l E, Z> -> 0, reducing to <X, Z> for X >= 0).
    const double shift = prob.h.kind() == ProxOracle::Kind::IndicatorBox ? prob.h.lower() : 0.0;
    rep.eta_c2 = safe_div(std::abs((xp->array() - shift).matrix().cwiseProduct(*z).sum()),
                          1.0 + x_norm + z->norm());
  }

  if (prob.m_ineq() > 0)
    rep.eta_c3 = safe_div(std::abs(y_ineq.dot(ineq_resid)),
                          1.0 + ineq_resid.norm() + y_ineq.norm());

  rep.rank = numerical_rank(r);

  rep.eta_max = std::max({rep.eta_p, rep.eta_z, rep.eta_d, rep.eta_k, rep.eta_kstar, rep.eta_c1});
  if (rep.eta_g) rep.eta_max = std::max(rep.eta_max, *rep.eta_g);
  if (rep.eta_c2) rep.eta_max = std::max(rep.eta_max, *rep.eta_c2);
  if (rep.eta_c3) rep.eta_max = std::max(rep.eta_max, *rep.eta_c3);
  return rep;
}

Solution solve(const SdpProblem& prob, const SolveOptions& opts) {
  opts.validate();
  const auto t_start = std::chrono::steady_clock::now();

  double b_inf = 0.0;
  if (prob.m() > 0) b_inf = std::max(b_inf, prob.b.cwiseAbs().maxCoeff());
  if (prob.m_ineq() > 0) b_inf = std::max(b_inf, prob.b_ineq.cwiseAbs().maxCoeff());

  AlmContext ctx = AlmContext::initial(prob, opts.sigma0 / (1.0 + b_inf));
  double alpha = opts.alpha;

  Solution sol;
  sol.r = random_point(prob.manifold, prob.p, opts.seed);

  // Barvinok-Pataki headroom for rank escapes; the low-rank bound only
  // covers linear SDPs, so splitting (X = W) or nonlinear objectives lift
  // the cap to n.
  int p_max = prob.n();
  if (prob.h.is_zero() && prob.f.kind() == SmoothOracle::Kind::Linear) {
    const long m_total = prob.m() + prob.manifold.m0() + prob.m_ineq();
    p_max = 1;
    while (static_cast<long>(p_max + 1) * (p_max + 2) / 2 <= m_total) ++p_max;
    p_max = std::min(prob.n(), p_max + 2);
  }
  p_max = std::max(p_max, prob.p);

  double eta_prev = std::numeric_limits<double>::infinity();
  double infeas_prev = std::numeric_limits<double>::infinity();
  double nu_carry = opts.newton.nu0;
  // Geometric component of the inner-tolerance schedule: keeps eps_k -> 0
  // even when the KKT residuals stall on loosely solved subproblems.
  double eps_geo = 0.1 * (1.0 + psi_eval(prob, ctx, sol.r).grad.norm());

  for (int k = 0; k < opts.max_outer; ++k) {
    const double eps_floor = std::max(opts.eps_tol / 10.0, opts.eps_k_floor);
    const double eps_k =
        std::max(eps_floor, std::min(opts.eps_k_factor * eta_prev, eps_geo));
    eps_geo = std::max(eps_floor, 0.3 * eps_geo);

    NewtonOptions nopts = opts.newton;
    nopts.nu0 = nu_carry;
    SubproblemResult inner = solve_subproblem(prob, ctx, sol.r, eps_k, nopts);
    sol.inner_iters += static_cast<int>(inner.trace.size());
    sol.cg_iters += inner.cg_total;
    sol.inner_traces.push_back(inner.trace);
    if (!inner.trace.empty()) nu_carry = std::clamp(inner.trace.back().nu, opts.newton.nu_min, 1.0);
    sol.r = std::move(inner.r);
    PsiCache cache = std::move(inner.cache);

    // Saddle escape: grow the rank along the most negative direction of S
    // when the subproblem stalled at an indefinite S.
    if (opts.enable_rank_escape) {
      for (int attempt = 0; attempt < 3; ++attempt) {
        const int n = prob.n();
        EigBounds eig;
        if (n <= opts.dense_eig_cap) {
          eig = dense_eig_bounds(s_dense(prob, ctx, cache, sol.r));
        } else {
          eig = lanczos_eig_bounds(
              [&](const Vector& v) { return s_matvec(prob, ctx, cache, sol.r, v); }, n, 60,
              opts.seed + 31 * k + attempt);
        }
        if (eig.lambda_min >= -1e-7 * (1.0 + std::abs(eig.lambda_min))) break;
        auto escaped = rank_escape(prob, ctx, sol.r, cache.value, eig.lambda_min,
                                   eig.min_vector, p_max);
        if (!escaped) break;
        ++sol.rank_escapes;
        SubproblemResult redo = solve_subproblem(prob, ctx, *escaped, eps_k, nopts);
        sol.inner_iters += static_cast<int>(redo.trace.size());
        sol.cg_iters += redo.cg_total;
        sol.r = std::move(redo.r);
        cache = std::move(redo.cache);
      }
    }

    // Alg. 1 updates: W = prox_{h/sigma}(X - Z/sigma), then multiplier ascent.
    Matrix w_new;
    const Matrix* xp = cache.x.size() ? &cache.x : nullptr;
    if (!prob.h.is_zero()) w_new = cache.w;
    Vector y_new = ctx.y;
    if (prob.m() > 0) {
      const Vector ax_minus_b = cache.eq_resid + ctx.y / ctx.sigma;
      y_new = ctx.y - alpha * ctx.sigma * ax_minus_b;
    }
    Vector yi_new = ctx.y_ineq;
    if (prob.m_ineq() > 0) {
      const Vector ax_minus_b = cache.ineq_val - ctx.y_ineq / ctx.sigma;
      yi_new = (ctx.y_ineq + alpha * ctx.sigma * ax_minus_b).cwiseMax(0.0);
    }
    Matrix z_new;
    if (!prob.h.is_zero()) z_new = ctx.z - alpha * ctx.sigma * (*xp - w_new);

    KktReport rep = kkt_report(prob, sol.r, w_new.size() ? &w_new : nullptr, y_new, yi_new,
                               z_new.size() ? &z_new : nullptr, opts);
    sol.outer_reports.push_back(rep);
    sol.report = rep;
    sol.outer_iters = k + 1;
    sol.psi_final = cache.value;

    ctx.y = std::move(y_new);
    ctx.y_ineq = std::move(yi_new);
    if (z_new.size()) ctx.z = std::move(z_new);

    eta_prev = rep.eta_max;
    if (rep.eta_max < opts.eps_tol) {
      sol.converged = true;
      break;
    }
    const double infeas_now = std::max(rep.eta_p, rep.eta_z);
    if (k >= 1)
      std::tie(ctx.sigma, alpha) = sigma_alpha_update(infeas_prev, infeas_now, ctx.sigma, alpha, opts);
    infeas_prev = infeas_now;
  }

  // Final state exports and certificates.
  sol.p_final = static_cast<int>(sol.r.rows());
  const PsiCache final_cache = psi_eval(prob, ctx, sol.r);
  sol.u = final_cache.u;
  if (prob.needs_explicit_x) {
    sol.x = final_cache.x;
    if (!prob.h.is_zero()) sol.w = final_cache.w;
  }
  sol.y = ctx.y;
  sol.y_ineq = ctx.y_ineq;
  if (ctx.has_z()) sol.z = ctx.z;
  if (prob.n() <= opts.dense_eig_cap) {
    const DualView dv = make_dual_view(prob, sol.r, ctx.y, ctx.y_ineq, ctx.has_z() ? &ctx.z : nullptr);
    sol.s = s_dense(prob, dv.ctx, dv.cache, sol.r);
    sol.u = dv.cache.u;
    if (opts.compute_certificates) {
      sol.gap = gap_certificate(prob.manifold, dv.cache.grad.norm(), sol.report.lambda_min_s);
      sol.rank_deficient_certificate =
          sol.report.rank < sol.p_final &&
          sol.report.lambda_min_s >= -1e-8 * (1.0 + sol.report.s_norm);
    }
  }

  sol.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return sol;
}

}  // namespace sdpdal
