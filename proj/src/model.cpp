#include "sdpdal/model.hpp"

#include <cmath>
#include <stdexcept>

namespace sdpdal {

SmoothOracle SmoothOracle::linear(SymMatrix c) {
  SmoothOracle f;
  f.kind_ = Kind::Linear;
  f.n_ = c.n();
  f.c_ = std::move(c);
  return f;
}

SmoothOracle SmoothOracle::linear_rank_one(int n, double scale, Vector w) {
  if (w.size() != n) throw std::invalid_argument("SmoothOracle: rank-one size mismatch");
  SmoothOracle f;
  f.kind_ = Kind::Linear;
  f.n_ = n;
  f.c_ = SymMatrix::zero(n);
  f.rank1_.emplace_back(scale, std::move(w));
  return f;
}

SmoothOracle SmoothOracle::weighted_quad(SymMatrix h_weights, SymMatrix g_data) {
  if (h_weights.n() != g_data.n())
    throw std::invalid_argument("SmoothOracle: H/G dimension mismatch");
  SmoothOracle f;
  f.kind_ = Kind::WeightedQuad;
  f.n_ = g_data.n();
  const Matrix hd = h_weights.dense();
  if ((hd.array() < 0.0).any())
    throw std::invalid_argument("SmoothOracle: weight matrix must be nonnegative");
  f.hw_ = std::move(h_weights);
  f.g_ = std::move(g_data);
  f.hw2_ = hd.cwiseProduct(hd);
  return f;
}

SmoothOracle SmoothOracle::linear_plus_entropy(SymMatrix c, EntropyKind kind, double lambda_ent) {
  if (lambda_ent < 0.0) throw std::invalid_argument("SmoothOracle: entropy weight < 0");
  SmoothOracle f;
  f.kind_ = Kind::LinearPlusEntropy;
  f.n_ = c.n();
  f.c_ = std::move(c);
  f.ent_ = kind;
  f.ent_lambda_ = lambda_ent;
  return f;
}

namespace {

// Entropy terms act through the Gram matrix G = R R^T using tr((R^T R)^k) =
// tr(G^k) and Xhat = X / tr(X).
struct EntropyEval {
  double value;
  Matrix gr;   // G * R
  Matrix g2r;  // G^2 * R (Renyi only)
  double tr_g, tr_g2, tr_g3;
};

EntropyEval entropy_pieces(EntropyKind kind, double lambda, const FactorMatrix& r) {
  EntropyEval e{};
  const Matrix g = r * r.transpose();
  e.tr_g = g.trace();
  if (e.tr_g <= 0.0) throw std::invalid_argument("entropy: zero Gram matrix");
  e.gr = g * r;
  e.tr_g2 = g.squaredNorm();
  if (kind == EntropyKind::Tsallis2) {
    e.value = lambda * (1.0 - e.tr_g2 / (e.tr_g * e.tr_g));
  } else if (kind == EntropyKind::Renyi3) {
    e.g2r = g * e.gr;
    e.tr_g3 = (g * g).cwiseProduct(g).sum();
    e.value = -0.5 * lambda * std::log(e.tr_g3 / (e.tr_g * e.tr_g * e.tr_g));
  }
  return e;
}

}  // namespace

std::pair<double, FactorMatrix> entropy_value_grad(EntropyKind kind, double lambda_ent,
                                                   const FactorMatrix& r) {
  if (kind == EntropyKind::None || lambda_ent == 0.0)
    return {0.0, FactorMatrix::Zero(r.rows(), r.cols())};
  const EntropyEval e = entropy_pieces(kind, lambda_ent, r);
  const double t = e.tr_g;
  if (kind == EntropyKind::Tsallis2) {
    // d/dR [1 - tr(G^2)/t^2] = -4GR/t^2 + 4 tr(G^2) R / t^3
    FactorMatrix grad = lambda_ent * (-4.0 / (t * t) * e.gr + 4.0 * e.tr_g2 / (t * t * t) * r);
    return {e.value, std::move(grad)};
  }
  // Renyi3: -(lambda/2) d/dR [log tr(G^3) - 3 log t] = -3 lambda (G^2 R / tr G^3 - R/t)
  FactorMatrix grad = -3.0 * lambda_ent * (e.g2r / e.tr_g3 - r / t);
  return {e.value, std::move(grad)};
}

double SmoothOracle::value(const FactorMatrix& r, const Matrix* x) const {
  switch (kind_) {
    case Kind::Linear:
    case Kind::LinearPlusEntropy: {
      double v = x ? c_.inner_dense(*x) : c_.inner_factored(r);
      for (const auto& [s, w] : rank1_) v += s * (r * w).squaredNorm();
      if (kind_ == Kind::LinearPlusEntropy)
        v += entropy_pieces(ent_, ent_lambda_, r).value;
      return v;
    }
    case Kind::WeightedQuad: {
      if (!x) throw std::logic_error("SmoothOracle: WeightedQuad needs explicit X");
      const Matrix resid = hw_.dense().cwiseProduct(*x - g_.dense());
      return 0.5 * resid.squaredNorm();
    }
  }
  return 0.0;
}

FactorMatrix SmoothOracle::times_grad(const FactorMatrix& m, const FactorMatrix& r,
                                      const Matrix* x) const {
  switch (kind_) {
    case Kind::Linear:
    case Kind::LinearPlusEntropy: {
      FactorMatrix out = c_.left_product(m);
      for (const auto& [s, w] : rank1_) out += s * (m * w) * w.transpose();
      if (kind_ == Kind::LinearPlusEntropy && ent_lambda_ > 0.0) {
        // M * grad f_ent with grad f_ent(X) expressed through M X = (M R^T) R.
        const Matrix g = r * r.transpose();
        const double t = g.trace();
        if (t <= 0.0) throw std::invalid_argument("entropy: zero Gram matrix");
        const Matrix mx = (m * r.transpose()) * r;
        if (ent_ == EntropyKind::Tsallis2) {
          const double tr_g2 = g.squaredNorm();
          out += ent_lambda_ * (-2.0 / (t * t) * mx + 2.0 * tr_g2 / (t * t * t) * m);
        } else {
          const Matrix mx2 = (mx * r.transpose()) * r;
          const double tr_g3 = (g * g).cwiseProduct(g).sum();
          out += -1.5 * ent_lambda_ * (mx2 / tr_g3 - m / t);
        }
      }
      return out;
    }
    case Kind::WeightedQuad: {
      if (!x) throw std::logic_error("SmoothOracle: WeightedQuad needs explicit X");
      return m * hw2_.cwiseProduct(*x - g_.dense());
    }
  }
  return FactorMatrix::Zero(m.rows(), m.cols());
}

FactorMatrix SmoothOracle::r_times_hess(const FactorMatrix& r, const FactorMatrix& u,
                                        const Matrix* x, const Matrix* d) const {
  switch (kind_) {
    case Kind::Linear:
      return FactorMatrix::Zero(r.rows(), r.cols());
    case Kind::WeightedQuad: {
      if (!d) throw std::logic_error("SmoothOracle: WeightedQuad Hessian needs dense D");
      return r * hw2_.cwiseProduct(*d);
    }
    case Kind::LinearPlusEntropy: {
      if (ent_lambda_ == 0.0) return FactorMatrix::Zero(r.rows(), r.cols());
      const Matrix g = r * r.transpose();
      const double t = g.trace();
      const Matrix p = r * u.transpose();  // R U^T, p x p
      const double tr_d = 2.0 * (r.array() * u.array()).sum();
      const Matrix gr = g * r;
      if (ent_ == EntropyKind::Tsallis2) {
        const double tr_g2 = g.squaredNorm();
        const double xd = 2.0 * (gr.array() * u.array()).sum();  // <X, D>
        // R hess f[D], f = lam (1 - tr(X^2)/t^2):
        //   -lam (2 RD/t^2 - 4 tr(D) RX/t^3 - 4 <X,D>/t^3 R + 6 tr(X^2) tr(D)/t^4 R)
        const Matrix rd = p * r + g * u;
        return -ent_lambda_ * (2.0 / (t * t) * rd - 4.0 * tr_d / (t * t * t) * gr -
                               4.0 * xd / (t * t * t) * r +
                               6.0 * tr_g2 * tr_d / (t * t * t * t) * r);
      }
      // Renyi3: f = -(lam/2) log(tr X^3 / t^3)
      //   hess f[D] = -(3 lam/2)[ (XD + DX)/c3 - 3 <X^2,D> X^2 / c3^2 + tr(D) I / t^2 ]
      const Matrix g2r = g * gr;
      const double c3 = (g * g).cwiseProduct(g).sum();
      const double x2d = 2.0 * (g2r.array() * u.array()).sum();  // <X^2, D>
      const Matrix r_xd_dx = (g * p + p * g + g * p.transpose()) * r + (g * g) * u;
      return -1.5 * ent_lambda_ *
             (r_xd_dx / c3 - 3.0 * x2d / (c3 * c3) * g2r + tr_d / (t * t) * r);
    }
  }
  return FactorMatrix::Zero(r.rows(), r.cols());
}

Vector SmoothOracle::grad_matvec(const Vector& v, const FactorMatrix& r, const Matrix* x) const {
  switch (kind_) {
    case Kind::Linear:
    case Kind::LinearPlusEntropy: {
      Vector out = c_.matvec(v);
      for (const auto& [s, w] : rank1_) out += s * w.dot(v) * w;
      if (kind_ == Kind::LinearPlusEntropy && ent_lambda_ > 0.0) {
        const Matrix g = r * r.transpose();
        const double t = g.trace();
        const Vector rv = r * v;
        if (ent_ == EntropyKind::Tsallis2) {
          const double tr_g2 = g.squaredNorm();
          out += ent_lambda_ * (-2.0 / (t * t) * (r.transpose() * rv) +
                                2.0 * tr_g2 / (t * t * t) * v);
        } else {
          const double c3 = (g * g).cwiseProduct(g).sum();
          out += -1.5 * ent_lambda_ * (r.transpose() * (g * rv) / c3 - v / t);
        }
      }
      return out;
    }
    case Kind::WeightedQuad: {
      if (!x) throw std::logic_error("SmoothOracle: WeightedQuad needs explicit X");
      return hw2_.cwiseProduct(*x - g_.dense()) * v;
    }
  }
  return Vector::Zero(v.size());
}

void SmoothOracle::grad_add_dense(Matrix& acc, const FactorMatrix& r, const Matrix* x) const {
  switch (kind_) {
    case Kind::Linear:
    case Kind::LinearPlusEntropy: {
      c_.add_to_dense(acc);
      for (const auto& [s, w] : rank1_) acc += s * w * w.transpose();
      if (kind_ == Kind::LinearPlusEntropy && ent_lambda_ > 0.0) {
        const Matrix xd = r.transpose() * r;
        const double t = xd.trace();
        if (ent_ == EntropyKind::Tsallis2) {
          const double tr_g2 = xd.squaredNorm();
          acc += ent_lambda_ * (-2.0 / (t * t) * xd);
          acc.diagonal().array() += ent_lambda_ * 2.0 * tr_g2 / (t * t * t);
        } else {
          const Matrix x2 = xd * xd;
          const double c3 = x2.cwiseProduct(xd).sum();
          acc += -1.5 * ent_lambda_ * (x2 / c3);
          acc.diagonal().array() += 1.5 * ent_lambda_ / t;
        }
      }
      break;
    }
    case Kind::WeightedQuad:
      if (!x) throw std::logic_error("SmoothOracle: WeightedQuad needs explicit X");
      acc += hw2_.cwiseProduct(*x - g_.dense());
      break;
  }
}

Matrix SmoothOracle::grad_dense(const FactorMatrix& r, const Matrix* x) const {
  Matrix acc = Matrix::Zero(n_, n_);
  grad_add_dense(acc, r, x);
  return acc;
}

SdpProblem SdpProblem::make(SmoothOracle f, ProxOracle h, SymLinearMap eq, Vector b,
                            SymLinearMap ineq, Vector b_ineq, ManifoldDescriptor manifold,
                            int p) {
  SdpProblem prob{std::move(f), std::move(h), std::move(eq), std::move(b),
                  std::move(ineq), std::move(b_ineq), std::move(manifold), p};
  const int n = prob.manifold.n;
  if (prob.f.n() != n || prob.eq.n() != n || prob.ineq.n() != n)
    throw std::invalid_argument("SdpProblem: dimension mismatch");
  if (prob.b.size() != prob.eq.m() || prob.b_ineq.size() != prob.ineq.m())
    throw std::invalid_argument("SdpProblem: right-hand side length mismatch");
  if (p < 1 || p > n) throw std::invalid_argument("SdpProblem: rank out of range");
  if (prob.manifold.kind == ManifoldDescriptor::Kind::BlockOrthonormal &&
      p < prob.manifold.max_block())
    throw std::invalid_argument("SdpProblem: rank below largest block");
  const long n2 = static_cast<long>(n) * n;
  prob.needs_explicit_x = !prob.h.is_zero() ||
                          prob.f.kind() == SmoothOracle::Kind::WeightedQuad ||
                          prob.eq.total_nnz() > n2 / 4 || prob.ineq.total_nnz() > n2 / 4;
  return prob;
}

AlmContext AlmContext::initial(const SdpProblem& prob, double sigma) {
  AlmContext ctx;
  ctx.y = Vector::Zero(prob.m());
  ctx.y_ineq = Vector::Zero(prob.m_ineq());
  if (!prob.h.is_zero()) ctx.z = Matrix::Zero(prob.n(), prob.n());
  ctx.sigma = sigma;
  return ctx;
}

PsiCache psi_eval(const SdpProblem& prob, const AlmContext& ctx, const FactorMatrix& r) {
  PsiCache c;
  const double sigma = ctx.sigma;
  const Matrix* xp = nullptr;
  if (prob.needs_explicit_x) {
    c.x = r.transpose() * r;
    xp = &c.x;
  }

  c.f_value = prob.f.value(r, xp);
  double value = c.f_value;

  if (!prob.h.is_zero()) {
    const Matrix v = c.x - ctx.z / sigma;
    c.w = prob.h.prox(1.0 / sigma, v);
    c.sigma_t = sigma * (v - c.w);
    c.t_mask = prob.h.jacobian_mask(sigma, v);
    c.h_value = prob.h.value(c.w);
    value += c.h_value + 0.5 / sigma * c.sigma_t.squaredNorm();
  }

  if (prob.m() > 0) {
    const Vector ax = xp ? prob.eq.apply_dense(*xp) : prob.eq.apply_factored(r);
    c.eq_resid = ax - prob.b - ctx.y / sigma;
    value += 0.5 * sigma * c.eq_resid.squaredNorm();
  }
  if (prob.m_ineq() > 0) {
    const Vector ax = xp ? prob.ineq.apply_dense(*xp) : prob.ineq.apply_factored(r);
    c.ineq_val = ax - prob.b_ineq + ctx.y_ineq / sigma;
    c.ineq_plus = c.ineq_val.cwiseMax(0.0);
    c.ineq_mask = c.ineq_val.unaryExpr([](double t) { return t >= 0.0 ? 1.0 : 0.0; });
    value += 0.5 * sigma * c.ineq_plus.squaredNorm();
  }
  c.value = value;
  if (!std::isfinite(value)) throw std::runtime_error("psi_eval: non-finite value");

  c.r_gradphi = times_gradphi(prob, ctx, c, r, r);
  c.ucache = make_usolve_cache(prob.manifold, r);
  c.u = solve_u(prob.manifold, c.ucache, r, c.r_gradphi);
  c.grad = riem_grad(prob.manifold, r, 2.0 * c.r_gradphi, c.u);
  return c;
}

FactorMatrix times_gradphi(const SdpProblem& prob, const AlmContext& ctx, const PsiCache& cache,
                           const FactorMatrix& m, const FactorMatrix& r) {
  const Matrix* xp = cache.x.size() ? &cache.x : nullptr;
  FactorMatrix out = prob.f.times_grad(m, r, xp);
  if (prob.m() > 0)
    out += ctx.sigma * prob.eq.adjoint_times_factor(cache.eq_resid, m);
  if (prob.m_ineq() > 0)
    out += ctx.sigma * prob.ineq.adjoint_times_factor(cache.ineq_plus, m);
  if (cache.sigma_t.size()) out += m * cache.sigma_t;
  return out;
}

FactorMatrix psi_hess_vec(const SdpProblem& prob, const AlmContext& ctx, const PsiCache& cache,
                          const FactorMatrix& r, const FactorMatrix& u) {
  if (u.rows() != r.rows() || u.cols() != r.cols())
    throw std::invalid_argument("psi_hess_vec: dimension mismatch");
  const Matrix* xp = cache.x.size() ? &cache.x : nullptr;

  // R * hessPhi[D], D = U^T R + R^T U.
  std::optional<Matrix> d_dense;
  if (prob.needs_explicit_x) d_dense = u.transpose() * r + r.transpose() * u;
  FactorMatrix rhd = prob.f.r_times_hess(r, u, xp, d_dense ? &*d_dense : nullptr);
  if (prob.m() > 0) {
    const Vector ad = d_dense ? prob.eq.apply_dense(*d_dense) : prob.eq.apply_factored_sym(u, r);
    rhd += ctx.sigma * prob.eq.adjoint_times_factor(ad, r);
  }
  if (prob.m_ineq() > 0) {
    const Vector ad =
        d_dense ? prob.ineq.apply_dense(*d_dense) : prob.ineq.apply_factored_sym(u, r);
    rhd += ctx.sigma * prob.ineq.adjoint_times_factor(cache.ineq_mask.cwiseProduct(ad), r);
  }
  if (cache.t_mask.size())
    rhd += ctx.sigma * (r * cache.t_mask.cwiseProduct(*d_dense));

  const FactorMatrix u_gradphi = times_gradphi(prob, ctx, cache, u, r);
  return riem_hess_vec(prob.manifold, cache.ucache, r, u, u_gradphi, rhd, cache.u);
}

Vector gradphi_matvec(const SdpProblem& prob, const AlmContext& ctx, const PsiCache& cache,
                      const FactorMatrix& r, const Vector& v) {
  const Matrix* xp = cache.x.size() ? &cache.x : nullptr;
  Vector out = prob.f.grad_matvec(v, r, xp);
  if (prob.m() > 0) out += ctx.sigma * prob.eq.adjoint_matvec(cache.eq_resid, v);
  if (prob.m_ineq() > 0) out += ctx.sigma * prob.ineq.adjoint_matvec(cache.ineq_plus, v);
  if (cache.sigma_t.size()) out += cache.sigma_t * v;
  return out;
}

Matrix gradphi_dense(const SdpProblem& prob, const AlmContext& ctx, const PsiCache& cache,
                     const FactorMatrix& r) {
  const int n = prob.n();
  Matrix acc = Matrix::Zero(n, n);
  prob.f.grad_add_dense(acc, r, cache.x.size() ? &cache.x : nullptr);
  if (prob.m() > 0) prob.eq.adjoint_add_dense(cache.eq_resid, acc, ctx.sigma);
  if (prob.m_ineq() > 0) prob.ineq.adjoint_add_dense(cache.ineq_plus, acc, ctx.sigma);
  if (cache.sigma_t.size()) acc += cache.sigma_t;
  return acc;
}

Vector s_matvec(const SdpProblem& prob, const AlmContext& ctx, const PsiCache& cache,
                const FactorMatrix& r, const Vector& v) {
  return gradphi_matvec(prob, ctx, cache, r, v) - bstar_matvec(prob.manifold, cache.u, v);
}

Matrix s_dense(const SdpProblem& prob, const AlmContext& ctx, const PsiCache& cache,
               const FactorMatrix& r) {
  Matrix s = gradphi_dense(prob, ctx, cache, r);
  bstar_add_dense(prob.manifold, cache.u, s, -1.0);
  return s;
}

}  // namespace sdpdal
