#include "sdpdal/manifold.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <random>
#include <stdexcept>

namespace sdpdal {

ManifoldDescriptor ManifoldDescriptor::frob_sphere(int n, double trace_target) {
  if (n <= 0 || !(trace_target > 0.0))
    throw std::invalid_argument("ManifoldDescriptor: bad sphere parameters");
  ManifoldDescriptor d;
  d.kind = Kind::FrobSphere;
  d.n = n;
  d.trace_target = trace_target;
  return d;
}

ManifoldDescriptor ManifoldDescriptor::oblique(int n) {
  if (n <= 0) throw std::invalid_argument("ManifoldDescriptor: bad dimension");
  ManifoldDescriptor d;
  d.kind = Kind::Oblique;
  d.n = n;
  return d;
}

ManifoldDescriptor ManifoldDescriptor::block_orthonormal(std::vector<int> block_sizes) {
  ManifoldDescriptor d;
  d.kind = Kind::BlockOrthonormal;
  d.n = 0;
  for (int b : block_sizes) {
    if (b <= 0) throw std::invalid_argument("ManifoldDescriptor: bad block size");
    d.n += b;
  }
  if (d.n == 0) throw std::invalid_argument("ManifoldDescriptor: empty partition");
  d.block_sizes = std::move(block_sizes);
  return d;
}

int ManifoldDescriptor::m0() const {
  switch (kind) {
    case Kind::FrobSphere:
      return 1;
    case Kind::Oblique:
      return n;
    case Kind::BlockOrthonormal: {
      int m = 0;
      for (int d : block_sizes) m += d * (d + 1) / 2;
      return m;
    }
  }
  return 0;
}

Vector ManifoldDescriptor::b0() const {
  switch (kind) {
    case Kind::FrobSphere:
      return Vector::Constant(1, trace_target);
    case Kind::Oblique:
      return Vector::Ones(n);
    case Kind::BlockOrthonormal: {
      Vector b(m0());
      int k = 0;
      for (int d : block_sizes)
        for (int i = 0; i < d; ++i)
          for (int j = 0; j <= i; ++j) b[k++] = (i == j) ? 1.0 : 0.0;
      return b;
    }
  }
  return Vector();
}

int ManifoldDescriptor::max_block() const {
  int m = 1;
  for (int d : block_sizes) m = std::max(m, d);
  return m;
}

double ManifoldDescriptor::diameter() const {
  switch (kind) {
    case Kind::FrobSphere:
      return trace_target;
    case Kind::Oblique:
      return static_cast<double>(n);
    case Kind::BlockOrthonormal:
      return static_cast<double>(n);
  }
  return 0.0;
}

double ManifoldDescriptor::feasibility_error(const FactorMatrix& r) const {
  switch (kind) {
    case Kind::FrobSphere:
      return std::abs(r.squaredNorm() - trace_target);
    case Kind::Oblique: {
      double e = 0.0;
      for (int i = 0; i < n; ++i) e = std::max(e, std::abs(r.col(i).squaredNorm() - 1.0));
      return e;
    }
    case Kind::BlockOrthonormal: {
      double e = 0.0;
      int base = 0;
      for (int d : block_sizes) {
        const Matrix g = r.middleCols(base, d).transpose() * r.middleCols(base, d);
        e = std::max(e, (g - Matrix::Identity(d, d)).cwiseAbs().maxCoeff());
        base += d;
      }
      return e;
    }
  }
  return 0.0;
}

Vector ManifoldDescriptor::tangency_residual(const FactorMatrix& r, const FactorMatrix& u) const {
  switch (kind) {
    case Kind::FrobSphere:
      return Vector::Constant(1, 2.0 * (r.array() * u.array()).sum());
    case Kind::Oblique: {
      Vector out(n);
      for (int i = 0; i < n; ++i) out[i] = 2.0 * r.col(i).dot(u.col(i));
      return out;
    }
    case Kind::BlockOrthonormal: {
      Vector out(m0());
      int k = 0, base = 0;
      for (int d : block_sizes) {
        const Matrix s = r.middleCols(base, d).transpose() * u.middleCols(base, d);
        for (int i = 0; i < d; ++i)
          for (int j = 0; j <= i; ++j) out[k++] = s(i, j) + s(j, i);
        base += d;
      }
      return out;
    }
  }
  return Vector();
}

FactorMatrix random_point(const ManifoldDescriptor& desc, int p, std::uint64_t seed) {
  if (p < 1) throw std::invalid_argument("random_point: rank must be positive");
  if (desc.kind == ManifoldDescriptor::Kind::BlockOrthonormal && p < desc.max_block())
    throw std::invalid_argument("random_point: rank below largest block size");
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  FactorMatrix r(p, desc.n);
  for (int j = 0; j < desc.n; ++j)
    for (int i = 0; i < p; ++i) r(i, j) = gauss(gen);
  auto projected = retract(desc, FactorMatrix::Zero(p, desc.n), r);
  if (!projected) throw std::runtime_error("random_point: degenerate draw");
  return *projected;
}

FactorMatrix project_tangent(const ManifoldDescriptor& desc, const FactorMatrix& r,
                             const FactorMatrix& v) {
  if (r.rows() != v.rows() || r.cols() != v.cols() || r.cols() != desc.n)
    throw std::invalid_argument("project_tangent: dimension mismatch");
  switch (desc.kind) {
    case ManifoldDescriptor::Kind::FrobSphere: {
      const double scale = (r.array() * v.array()).sum() / r.squaredNorm();
      return v - scale * r;
    }
    case ManifoldDescriptor::Kind::Oblique: {
      FactorMatrix u = v;
      for (int i = 0; i < desc.n; ++i)
        u.col(i) -= (r.col(i).dot(v.col(i)) / r.col(i).squaredNorm()) * r.col(i);
      return u;
    }
    case ManifoldDescriptor::Kind::BlockOrthonormal: {
      FactorMatrix u = v;
      int base = 0;
      for (int d : desc.block_sizes) {
        auto rb = r.middleCols(base, d);
        auto vb = v.middleCols(base, d);
        const Matrix s = 0.5 * (rb.transpose() * vb + vb.transpose() * rb);
        u.middleCols(base, d) = vb - rb * s;
        base += d;
      }
      return u;
    }
  }
  return v;
}

std::optional<FactorMatrix> retract(const ManifoldDescriptor& desc, const FactorMatrix& r,
                                    const FactorMatrix& u) {
  if (!u.allFinite()) return std::nullopt;
  FactorMatrix a = r + u;
  switch (desc.kind) {
    case ManifoldDescriptor::Kind::FrobSphere: {
      const double nrm = a.norm();
      if (nrm <= 0.0) return std::nullopt;
      return FactorMatrix(std::sqrt(desc.trace_target) / nrm * a);
    }
    case ManifoldDescriptor::Kind::Oblique: {
      for (int i = 0; i < desc.n; ++i) {
        double nrm = a.col(i).norm();
        if (nrm <= 1e-300) {
          // Zero column: deterministic unit replacement keeps the map defined.
          a.col(i).setZero();
          a(0, i) = 1.0;
          nrm = 1.0;
        }
        a.col(i) /= nrm;
      }
      return a;
    }
    case ManifoldDescriptor::Kind::BlockOrthonormal: {
      int base = 0;
      for (int d : desc.block_sizes) {
        auto ab = a.middleCols(base, d);
        const Matrix g = ab.transpose() * ab;
        Eigen::SelfAdjointEigenSolver<Matrix> es(g);
        if (es.info() != Eigen::Success) return std::nullopt;
        const double lo = es.eigenvalues().minCoeff();
        if (lo <= 1e-12 * std::max(1.0, es.eigenvalues().maxCoeff())) return std::nullopt;
        // Polar factor A (A^T A)^{-1/2}.
        const Matrix inv_sqrt = es.eigenvectors() *
                                es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
                                es.eigenvectors().transpose();
        a.middleCols(base, d) = ab * inv_sqrt;
        base += d;
      }
      return a;
    }
  }
  return std::nullopt;
}

USolveCache make_usolve_cache(const ManifoldDescriptor& desc, const FactorMatrix& r) {
  USolveCache c;
  switch (desc.kind) {
    case ManifoldDescriptor::Kind::FrobSphere:
      c.tr_x = r.squaredNorm();
      break;
    case ManifoldDescriptor::Kind::Oblique:
      c.diag_x.resize(desc.n);
      for (int i = 0; i < desc.n; ++i) c.diag_x[i] = r.col(i).squaredNorm();
      break;
    case ManifoldDescriptor::Kind::BlockOrthonormal: {
      int base = 0;
      for (int d : desc.block_sizes) {
        const Matrix g = r.middleCols(base, d).transpose() * r.middleCols(base, d);
        Eigen::SelfAdjointEigenSolver<Matrix> es(g);
        c.block_evecs.push_back(es.eigenvectors());
        c.block_evals.push_back(es.eigenvalues());
        base += d;
      }
      break;
    }
  }
  return c;
}

Vector solve_u(const ManifoldDescriptor& desc, const USolveCache& cache, const FactorMatrix& r,
               const FactorMatrix& rm) {
  switch (desc.kind) {
    case ManifoldDescriptor::Kind::FrobSphere: {
      if (cache.tr_x <= 0.0) throw std::runtime_error("solve_u: zero trace");
      // tr(X M) = <R, RM>
      return Vector::Constant(1, (r.array() * rm.array()).sum() / cache.tr_x);
    }
    case ManifoldDescriptor::Kind::Oblique: {
      Vector u(desc.n);
      for (int i = 0; i < desc.n; ++i) {
        const double xii = cache.diag_x[i];
        if (xii <= 1e-14)
          throw std::runtime_error("solve_u: vanishing diagonal (singular system)");
        u[i] = r.col(i).dot(rm.col(i)) / xii;
      }
      return u;
    }
    case ManifoldDescriptor::Kind::BlockOrthonormal: {
      // Per block: sym(X_jj U_j) = sym((X M)_jj), solved in the eigenbasis of
      // X_jj where the operator is entrywise (lam_a + lam_b)/2.
      Vector u(desc.m0());
      int base = 0, k = 0;
      for (std::size_t jb = 0; jb < desc.block_sizes.size(); ++jb) {
        const int d = desc.block_sizes[jb];
        const Matrix xm = r.middleCols(base, d).transpose() * rm.middleCols(base, d);
        const Matrix c = 0.5 * (xm + xm.transpose());
        const auto& q = cache.block_evecs[jb];
        const auto& lam = cache.block_evals[jb];
        const double lmax = std::max(1.0, lam.maxCoeff());
        Matrix ct = q.transpose() * c * q;
        for (int a = 0; a < d; ++a)
          for (int b = 0; b < d; ++b) {
            const double den = 0.5 * (lam[a] + lam[b]);
            if (den <= 1e-14 * lmax)
              throw std::runtime_error(
                  "solve_u: singular block system, conditioning ~" + std::to_string(lmax / std::max(den, 1e-300)));
            ct(a, b) /= den;
          }
        const Matrix uj = q * ct * q.transpose();
        for (int a = 0; a < d; ++a)
          for (int b = 0; b <= a; ++b) u[k++] = 0.5 * (uj(a, b) + uj(b, a));
        base += d;
      }
      return u;
    }
  }
  return Vector();
}

FactorMatrix bstar_times_factor(const ManifoldDescriptor& desc, const Vector& u,
                                const FactorMatrix& m) {
  switch (desc.kind) {
    case ManifoldDescriptor::Kind::FrobSphere:
      return u[0] * m;
    case ManifoldDescriptor::Kind::Oblique:
      return m * u.asDiagonal();
    case ManifoldDescriptor::Kind::BlockOrthonormal: {
      FactorMatrix out(m.rows(), desc.n);
      int base = 0, k = 0;
      for (int d : desc.block_sizes) {
        Matrix uj(d, d);
        for (int a = 0; a < d; ++a)
          for (int b = 0; b <= a; ++b) {
            uj(a, b) = u[k];
            uj(b, a) = u[k];
            ++k;
          }
        out.middleCols(base, d) = m.middleCols(base, d) * uj;
        base += d;
      }
      return out;
    }
  }
  return m;
}

Vector bstar_matvec(const ManifoldDescriptor& desc, const Vector& u, const Vector& v) {
  FactorMatrix row = v.transpose();
  return bstar_times_factor(desc, u, row).transpose();
}

void bstar_add_dense(const ManifoldDescriptor& desc, const Vector& u, Matrix& acc, double scale) {
  switch (desc.kind) {
    case ManifoldDescriptor::Kind::FrobSphere:
      acc.diagonal().array() += scale * u[0];
      break;
    case ManifoldDescriptor::Kind::Oblique:
      acc.diagonal() += scale * u;
      break;
    case ManifoldDescriptor::Kind::BlockOrthonormal: {
      int base = 0, k = 0;
      for (int d : desc.block_sizes) {
        for (int a = 0; a < d; ++a)
          for (int b = 0; b <= a; ++b) {
            acc(base + a, base + b) += scale * u[k];
            if (a != b) acc(base + b, base + a) += scale * u[k];
            ++k;
          }
        base += d;
      }
      break;
    }
  }
}

double b0_dot(const ManifoldDescriptor& desc, const Vector& u) {
  switch (desc.kind) {
    case ManifoldDescriptor::Kind::FrobSphere:
      return desc.trace_target * u[0];
    case ManifoldDescriptor::Kind::Oblique:
      return u.sum();
    case ManifoldDescriptor::Kind::BlockOrthonormal: {
      double s = 0.0;
      int k = 0;
      for (int d : desc.block_sizes)
        for (int a = 0; a < d; ++a)
          for (int b = 0; b <= a; ++b) {
            if (a == b) s += u[k];
            ++k;
          }
      return s;
    }
  }
  return 0.0;
}

FactorMatrix riem_grad(const ManifoldDescriptor& desc, const FactorMatrix& r,
                       const FactorMatrix& eucl_grad, const Vector& u) {
  return eucl_grad - 2.0 * bstar_times_factor(desc, u, r);
}

FactorMatrix riem_hess_vec(const ManifoldDescriptor& desc, const USolveCache& cache,
                           const FactorMatrix& r, const FactorMatrix& u_tangent,
                           const FactorMatrix& u_gradphi, const FactorMatrix& r_hessphi_d,
                           const Vector& u_mult) {
  const Vector u_prime = solve_u(desc, cache, r, r_hessphi_d);
  FactorMatrix h = 2.0 * u_gradphi + 2.0 * r_hessphi_d -
                   2.0 * bstar_times_factor(desc, u_prime, r) -
                   2.0 * bstar_times_factor(desc, u_mult, u_tangent);
  // The formula is exact up to normal-space components; projecting recovers
  // the Levi-Civita Hessian and keeps CG iterates in the tangent space.
  return project_tangent(desc, r, h);
}

}  // namespace sdpdal
