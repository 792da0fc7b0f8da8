#include "sdpdal/newton.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

namespace sdpdal {

void NewtonOptions::validate() const {
  if (!(0.0 < eta1 && eta1 <= eta2 && eta2 < 1.0))
    throw std::invalid_argument("NewtonOptions: need 0 < eta1 <= eta2 < 1");
  if (!(0.0 < gamma0 && gamma0 < 1.0 && 1.0 <= gamma1 && gamma1 <= gamma2))
    throw std::invalid_argument("NewtonOptions: need 0 < gamma0 < 1 <= gamma1 <= gamma2");
  if (!(nu_min > 0.0) || !(theta >= 0.0))
    throw std::invalid_argument("NewtonOptions: bad nu_min/theta");
  if (!(0.0 < ls_delta && ls_delta < 1.0))
    throw std::invalid_argument("NewtonOptions: need 0 < delta < 1");
}

McgResult mcg(const FactorMatrix& grad, const HessAction& hess, double nu, double theta,
              double eps_curv, int cap) {
  const double gnorm = grad.norm();
  if (!(gnorm > 0.0)) throw std::invalid_argument("mcg: zero gradient");
  // Forcing term for the superlinear regime: min(0.5, ||g||^0.5) ||g||.
  const double forcing = std::min(0.5, std::sqrt(gnorm)) * gnorm;

  McgResult out;
  FactorMatrix u = FactorMatrix::Zero(grad.rows(), grad.cols());
  FactorMatrix res = -grad;  // residual of (H + nu I) U = -grad
  FactorMatrix dir = res;
  double res_sq = res.squaredNorm();
  double u_quad = 0.0;  // <U, (H + nu I) U>, maintained via conjugacy

  for (int it = 0; it < cap; ++it) {
    const FactorMatrix hd = hess(dir) + nu * dir;
    const double curv = (dir.array() * hd.array()).sum();
    if (curv <= eps_curv * dir.squaredNorm()) {
      out.status = McgStatus::NegativeCurvature;
      out.iters = it;
      if (it == 0) {
        out.direction = -grad;
        out.quad_curvature = (grad.array() * (hess(grad) + nu * grad).array()).sum();
      } else {
        out.direction = std::move(u);
        out.quad_curvature = u_quad;
      }
      break;
    }
    const double alpha = res_sq / curv;
    u += alpha * dir;
    u_quad += alpha * alpha * curv;
    res -= alpha * hd;
    const double res_sq_next = res.squaredNorm();
    out.iters = it + 1;
    if (std::sqrt(res_sq_next) <= std::min(theta * u.norm(), forcing)) {
      out.status = McgStatus::Converged;
      out.direction = std::move(u);
      out.quad_curvature = u_quad;
      break;
    }
    if (it + 1 == cap) {
      out.status = McgStatus::CapReached;
      out.direction = std::move(u);
      out.quad_curvature = u_quad;
      break;
    }
    dir = res + (res_sq_next / res_sq) * dir;
    res_sq = res_sq_next;
  }

  // Descent safeguard; CG from zero guarantees this, roundoff aside.
  if ((out.direction.array() * grad.array()).sum() >= 0.0) {
    out.direction = -grad;
    out.quad_curvature = (grad.array() * (hess(grad) + nu * grad).array()).sum();
    out.status = McgStatus::NegativeCurvature;
  }
  return out;
}

std::optional<double> armijo_step(double g_dot_u, double u_hu_nu, double mu, double delta,
                                  int cap) {
  if (!(g_dot_u < 0.0)) throw std::invalid_argument("armijo_step: slope must be negative");
  double s = 1.0;
  for (int h = 0; h <= cap; ++h) {
    // m(sU) = s <g,U> + s^2/2 <U,(H+nu)U>
    const double model = s * g_dot_u + 0.5 * s * s * u_hu_nu;
    if (model <= mu * s * g_dot_u) return s;
    s *= delta;
  }
  return std::nullopt;
}

RatioUpdate ratio_and_update(double psi_old, double psi_new, double m_value, double nu,
                             double u_norm_sq, const NewtonOptions& opts) {
  const double predicted = m_value - 0.5 * nu * u_norm_sq;
  if (!(predicted < 0.0))
    throw std::invalid_argument("ratio_and_update: nonnegative predicted reduction");
  RatioUpdate out;
  out.rho = (psi_new - psi_old) / predicted;
  if (out.rho >= opts.eta2) {
    out.accept = true;
    out.nu_next = std::max(opts.nu_min, opts.gamma0 * nu);
  } else if (out.rho >= opts.eta1) {
    out.accept = true;
    out.nu_next = opts.gamma1 * nu;
  } else {
    out.accept = false;
    out.nu_next = opts.gamma2 * nu;
  }
  return out;
}

SubproblemResult solve_subproblem(const SdpProblem& prob, const AlmContext& ctx,
                                  const FactorMatrix& r0, double eps_k,
                                  const NewtonOptions& opts) {
  opts.validate();
  if (!(eps_k > 0.0)) throw std::invalid_argument("solve_subproblem: eps_k must be positive");

  SubproblemResult out;
  out.r = r0;
  out.cache = psi_eval(prob, ctx, out.r);
  double nu = std::max(opts.nu_min, opts.nu0);

  int rejected_streak = 0;
  int accepted_since_check = 0;
  double psi_at_last_check = out.cache.value;
  int accepted_total = 0;

  for (int l = 0; l < opts.max_iters; ++l) {
    const double gnorm = out.cache.grad.norm();
    if (gnorm <= eps_k) {
      out.converged = true;
      break;
    }

    HessAction hess = [&](const FactorMatrix& v) {
      return psi_hess_vec(prob, ctx, out.cache, out.r, v);
    };
    const McgResult cg = mcg(out.cache.grad, hess, nu, opts.theta, opts.eps_curv, opts.cg_cap);
    out.cg_total += std::max(1, cg.iters);

    const double g_dot_u = (out.cache.grad.array() * cg.direction.array()).sum();
    const auto step = armijo_step(g_dot_u, cg.quad_curvature, opts.mu, opts.ls_delta, opts.ls_max);

    NewtonTraceEntry te;
    te.grad_norm = gnorm;
    te.psi = out.cache.value;
    te.nu = nu;
    te.cg_iters = cg.iters;

    bool accepted = false;
    if (step) {
      const double s = *step;
      const FactorMatrix su = s * cg.direction;
      const auto trial = retract(prob.manifold, out.r, su);
      if (trial) {
        PsiCache trial_cache;
        bool ok = true;
        try {
          trial_cache = psi_eval(prob, ctx, *trial);
        } catch (const std::runtime_error&) {
          ok = false;  // non-finite trial value: treat as a failed step
        }
        if (ok) {
          const double m_value =
              s * g_dot_u + 0.5 * s * s * cg.quad_curvature + 0.5 * nu * su.squaredNorm();
          // Roundoff cushion: when both reductions sit at evaluation-noise
          // scale the ratio degenerates, so shift numerator and denominator
          // by the noise floor (ratio -> 1 at the floor, unchanged away
          // from it).
          const double noise =
              64.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(out.cache.value));
          const RatioUpdate ru =
              ratio_and_update(out.cache.value, trial_cache.value - noise, m_value - noise, nu,
                               su.squaredNorm(), opts);
          te.rho = ru.rho;
          te.step = s;
          nu = ru.nu_next;
          if (ru.accept) {
            out.r = *trial;
            out.cache = std::move(trial_cache);
            accepted = true;
          }
        } else {
          nu = opts.gamma2 * nu;
        }
      } else {
        nu = opts.gamma2 * nu;
      }
    } else {
      nu = opts.gamma2 * nu;
    }

    te.accepted = accepted;
    out.trace.push_back(te);

    if (accepted) {
      rejected_streak = 0;
      ++accepted_total;
      ++accepted_since_check;
      if (accepted_since_check >= 10) {
        // Stagnation: relative Psi change below roundoff over 10 accepted steps.
        const double rel =
            std::abs(psi_at_last_check - out.cache.value) / (1.0 + std::abs(out.cache.value));
        if (rel < 1e-14) break;
        psi_at_last_check = out.cache.value;
        accepted_since_check = 0;
      }
      // Re-enforce the manifold invariant against roundoff drift.
      if (accepted_total % 50 == 0) {
        if (auto snapped = retract(prob.manifold, out.r, FactorMatrix::Zero(out.r.rows(), out.r.cols()))) {
          out.r = *snapped;
          out.cache = psi_eval(prob, ctx, out.r);
        }
      }
    } else {
      if (++rejected_streak >= 20) break;
    }
  }
  if (!out.converged && out.cache.grad.norm() <= eps_k) out.converged = true;
  return out;
}

std::optional<FactorMatrix> rank_escape(const SdpProblem& prob, const AlmContext& ctx,
                                        const FactorMatrix& r, double psi_at_r,
                                        double lambda_min, const Vector& eigvec, int p_max) {
  if (lambda_min >= 0.0) return std::nullopt;
  const int p = static_cast<int>(r.rows());
  if (eigvec.size() != prob.n()) return std::nullopt;

  // Prefer a direction in the left null space of R (rank-deficient factor);
  // only append a genuinely new row when R has full row rank and headroom
  // remains. Either way the perturbed X moves by ~ scale^2 v v^T with
  // v^T S v < 0.
  Vector null_dir;
  {
    Eigen::SelfAdjointEigenSolver<Matrix> es(r * r.transpose());
    if (es.eigenvalues()[0] <= 1e-14 * std::max(1.0, es.eigenvalues()[p - 1]))
      null_dir = es.eigenvectors().col(0);
  }
  const bool grow = null_dir.size() == 0;
  if (grow && (p >= p_max || p >= prob.n())) return std::nullopt;

  double scale = 0.1 * std::sqrt(prob.manifold.diameter() / prob.n());
  for (int attempt = 0; attempt < 8; ++attempt) {
    FactorMatrix trial;
    if (grow) {
      trial.resize(p + 1, prob.n());
      trial.topRows(p) = r;
      trial.row(p) = scale * eigvec.transpose();
    } else {
      trial = r + scale * null_dir * eigvec.transpose();
    }
    const auto snapped =
        retract(prob.manifold, trial, FactorMatrix::Zero(trial.rows(), trial.cols()));
    if (snapped) {
      try {
        const PsiCache c = psi_eval(prob, ctx, *snapped);
        if (c.value < psi_at_r) return snapped;
      } catch (const std::runtime_error&) {
      }
    }
    scale *= 0.25;
  }
  return std::nullopt;
}

}  // namespace sdpdal
