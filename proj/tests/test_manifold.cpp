#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>

#include "sdpdal/manifold.hpp"
#include "support.hpp"

using namespace sdpdal;
namespace ts = sdpdal::testsupport;

namespace {

std::vector<std::pair<ManifoldDescriptor, int>> all_variants() {
  return {{ManifoldDescriptor::frob_sphere(6), 3},
          {ManifoldDescriptor::frob_sphere(6, 2.5), 4},
          {ManifoldDescriptor::oblique(5), 3},
          {ManifoldDescriptor::block_orthonormal({2, 2}), 3},
          {ManifoldDescriptor::block_orthonormal({2, 3, 1}), 4}};
}

}  // namespace

TEST_CASE("random_point lands on the manifold") {
  {
    const auto d = ManifoldDescriptor::frob_sphere(7);
    const auto r = random_point(d, 3, 42);
    CHECK(std::abs(r.norm() - 1.0) < 1e-14);
    CHECK(random_point(d, 3, 42).isApprox(r));  // deterministic
    CHECK_FALSE(random_point(d, 3, 43).isApprox(r));
  }
  {
    const auto d = ManifoldDescriptor::oblique(4);
    const auto r = random_point(d, 3, 7);
    for (int i = 0; i < 4; ++i) CHECK(std::abs(r.col(i).norm() - 1.0) < 1e-14);
  }
  {
    // QR-oracle check of per-block orthonormality.
    const auto d = ManifoldDescriptor::block_orthonormal({2, 2});
    const auto r = random_point(d, 3, 9);
    for (int b = 0; b < 2; ++b) {
      const Matrix blk = r.middleCols(2 * b, 2);
      Eigen::HouseholderQR<Matrix> qr(blk);
      const Matrix q = qr.householderQ() * Matrix::Identity(3, 2);
      CHECK((blk.transpose() * blk - Matrix::Identity(2, 2)).norm() < 1e-12);
      CHECK((q.transpose() * q - Matrix::Identity(2, 2)).norm() < 1e-12);
    }
    CHECK_THROWS_AS(random_point(d, 1, 1), std::invalid_argument);
  }
}

TEST_CASE("project_tangent: closed forms, idempotence, self-adjointness") {
  {
    const auto d = ManifoldDescriptor::frob_sphere(6);
    const auto r = random_point(d, 3, 1);
    CHECK(project_tangent(d, r, r).norm() < 1e-14);  // radial direction dies
  }
  for (const auto& [d, p] : all_variants()) {
    const auto r = random_point(d, p, 11);
    const Matrix v = ts::gaussian_matrix(p, d.n, 12);
    const Matrix u = project_tangent(d, r, v);
    CHECK(d.tangency_residual(r, u).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((project_tangent(d, r, u) - u).norm() < 1e-12 * (1 + u.norm()));
    // already-tangent inputs pass through
    const Matrix w = ts::gaussian_matrix(p, d.n, 13);
    const Matrix pw = project_tangent(d, r, w);
    const double self_adjoint =
        pw.cwiseProduct(v).sum() - w.cwiseProduct(u).sum();
    CHECK(std::abs(self_adjoint) < 1e-11 * (1 + pw.norm() * v.norm()));
  }
}

TEST_CASE("retract: fixed point, feasibility, second order") {
  for (const auto& [d, p] : all_variants()) {
    const auto r = random_point(d, p, 21);
    const auto same = retract(d, r, FactorMatrix::Zero(p, d.n));
    REQUIRE(same);
    CHECK((*same - r).norm() < 1e-13);

    const Matrix u = ts::random_tangent(d, r, 22);
    const auto moved = retract(d, r, u);
    REQUIRE(moved);
    CHECK(d.feasibility_error(*moved) < 1e-12);

    // ||retract(R, tU) - R - tU|| = O(t^2): the error ratio ~4 when t halves.
    double err_prev = -1.0;
    double t = 1e-2;
    for (int k = 0; k < 3; ++k) {
      const auto rt = retract(d, r, t * u);
      REQUIRE(rt);
      const double err = (*rt - r - t * u).norm();
      if (err_prev > 0.0 && err > 1e-13) {
        const double ratio = err_prev / err;
        CHECK(ratio > 2.5);
        CHECK(ratio < 6.0);
      }
      err_prev = err;
      t *= 0.5;
    }
  }
  {
    // FrobSphere retraction renormalizes to the radius.
    const auto d = ManifoldDescriptor::frob_sphere(5, 3.0);
    const auto r = random_point(d, 2, 31);
    const Matrix u = ts::random_tangent(d, r, 32);
    CHECK(std::abs(retract(d, r, u)->squaredNorm() - 3.0) < 1e-12);
  }
  {
    // Oblique zero column gets the deterministic unit replacement.
    const auto d = ManifoldDescriptor::oblique(3);
    const auto r = random_point(d, 2, 33);
    const auto snapped = retract(d, FactorMatrix::Zero(2, 3), -r + r);  // all-zero input
    REQUIRE(snapped);
    CHECK(d.feasibility_error(*snapped) < 1e-14);
  }
}

TEST_CASE("solve_u closed forms and residual") {
  {
    // FrobSphere with gradPhi = I: u = tr(X)/tr(X) = 1, S = 0.
    const auto d = ManifoldDescriptor::frob_sphere(4);
    const auto r = random_point(d, 2, 41);
    const Matrix rm = r;  // R * I
    const auto cache = make_usolve_cache(d, r);
    const Vector u = solve_u(d, cache, r, rm);
    CHECK(u[0] == doctest::Approx(1.0));
  }
  {
    // Oblique, X = I2, gradPhi = [[0,1],[1,0]]: diagonal of X gradPhi is 0.
    const auto d = ManifoldDescriptor::oblique(2);
    FactorMatrix r(2, 2);
    r << 1, 0, 0, 1;
    Matrix gp(2, 2);
    gp << 0, 1, 1, 0;
    const auto cache = make_usolve_cache(d, r);
    const Vector u = solve_u(d, cache, r, r * gp);
    CHECK(u.cwiseAbs().maxCoeff() < 1e-14);
  }
  // Residual B(X S) = 0 with S = gradPhi - B*(u), random instances.
  for (const auto& [d, p] : all_variants()) {
    const auto r = random_point(d, p, 51);
    const Matrix gradphi = ts::random_symmetric(d.n, 52);
    const auto cache = make_usolve_cache(d, r);
    const Vector u = solve_u(d, cache, r, r * gradphi);
    Matrix s = gradphi;
    bstar_add_dense(d, u, s, -1.0);
    const Matrix xs = r.transpose() * (r * s);
    // residual per variant: B extracts the symmetric part entries
    const Matrix xs_sym = 0.5 * (xs + xs.transpose());
    double resid = 0.0;
    if (d.kind == ManifoldDescriptor::Kind::FrobSphere) {
      resid = std::abs(xs_sym.trace());
    } else if (d.kind == ManifoldDescriptor::Kind::Oblique) {
      resid = xs_sym.diagonal().cwiseAbs().maxCoeff();
    } else {
      int base = 0;
      for (int db : d.block_sizes) {
        resid = std::max(resid, xs_sym.block(base, base, db, db).cwiseAbs().maxCoeff());
        base += db;
      }
    }
    CHECK(resid < 1e-10 * (1.0 + gradphi.norm()));
  }
}

TEST_CASE("riem_grad: 2RS form, tangency, projection identity") {
  {
    // gradPhi = I on the sphere gives S = 0 and zero gradient.
    const auto d = ManifoldDescriptor::frob_sphere(5);
    const auto r = random_point(d, 2, 61);
    const auto cache = make_usolve_cache(d, r);
    const Vector u = solve_u(d, cache, r, r);
    const Matrix g = riem_grad(d, r, 2.0 * r, u);
    CHECK(g.norm() < 1e-12);
  }
  for (const auto& [d, p] : all_variants()) {
    const auto r = random_point(d, p, 71);
    const Matrix gradphi = ts::random_symmetric(d.n, 72);
    const auto cache = make_usolve_cache(d, r);
    const Matrix rm = r * gradphi;
    const Vector u = solve_u(d, cache, r, rm);
    const Matrix grad = riem_grad(d, r, 2.0 * rm, u);
    // tangency
    CHECK(d.tangency_residual(r, grad).cwiseAbs().maxCoeff() < 1e-10 * (1 + gradphi.norm()));
    // equals 2RS
    Matrix s = gradphi;
    bstar_add_dense(d, u, s, -1.0);
    CHECK((grad - 2.0 * r * s).norm() < 1e-10 * (1 + s.norm()));
    // equals the tangent projection of the Euclidean gradient
    const Matrix proj = project_tangent(d, r, 2.0 * rm);
    CHECK((grad - proj).norm() < 1e-10 * (1 + proj.norm()));
  }
}

TEST_CASE("riem_hess_vec: zero input, symmetry, quadratic form") {
  for (const auto& [d, p] : all_variants()) {
    const auto r = random_point(d, p, 81);
    const Matrix gradphi = ts::random_symmetric(d.n, 82);
    const auto cache = make_usolve_cache(d, r);
    const Vector umult = solve_u(d, cache, r, r * gradphi);

    // The smooth model here is Phi(X) = <gradphi, X> + 1/2 <X, QXQ>-free:
    // use hessPhi[D] = W o D with a fixed symmetric weight (self-adjoint).
    const Matrix weights = ts::random_symmetric(d.n, 83).cwiseAbs();
    auto hess_action = [&](const Matrix& u_tan) {
      const Matrix dmat = u_tan.transpose() * r + r.transpose() * u_tan;
      return Matrix(r * weights.cwiseProduct(dmat));
    };
    auto full_hess = [&](const Matrix& u_tan) {
      return riem_hess_vec(d, cache, r, u_tan, u_tan * gradphi, hess_action(u_tan), umult);
    };

    const Matrix zero = FactorMatrix::Zero(p, d.n);
    CHECK(full_hess(zero).norm() == 0.0);

    const Matrix u1 = ts::random_tangent(d, r, 84);
    const Matrix u2 = ts::random_tangent(d, r, 85);
    const Matrix h1 = full_hess(u1);
    const Matrix h2 = full_hess(u2);
    CHECK(d.tangency_residual(r, h1).cwiseAbs().maxCoeff() < 1e-9 * (1 + h1.norm()));
    const double s12 = h1.cwiseProduct(u2).sum();
    const double s21 = h2.cwiseProduct(u1).sum();
    CHECK(std::abs(s12 - s21) < 1e-9 * (1 + std::abs(s12)));

    // <U, Hess[U]> = 2 tr(U S U^T) + <D, hessPhi[D]>
    Matrix s = gradphi;
    bstar_add_dense(d, umult, s, -1.0);
    const Matrix dmat = u1.transpose() * r + r.transpose() * u1;
    const double quad = h1.cwiseProduct(u1).sum();
    const double expected =
        2.0 * (u1 * s).cwiseProduct(u1).sum() + dmat.cwiseProduct(weights.cwiseProduct(dmat)).sum();
    CHECK(quad == doctest::Approx(expected).epsilon(1e-9));
  }
}

TEST_CASE("singular block system reports conditioning") {
  const auto d = ManifoldDescriptor::block_orthonormal({2, 2});
  FactorMatrix r = FactorMatrix::Zero(3, 4);  // rank-deficient blocks off the manifold
  r(0, 0) = 1.0;
  r(0, 2) = 1.0;
  const auto cache = make_usolve_cache(d, r);
  CHECK_THROWS_AS(solve_u(d, cache, r, r * ts::random_symmetric(4, 91)), std::runtime_error);
}
