#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "sdpdal/prox.hpp"
#include "support.hpp"

using namespace sdpdal;
namespace ts = sdpdal::testsupport;

TEST_CASE("prox closed forms") {
  Matrix w(2, 2);
  w << 2.0, -0.3, -0.3, 0.1;
  const Matrix p = ProxOracle::l1(1.0).prox(0.5, w);  // t*lambda = 0.5
  CHECK(p(0, 0) == doctest::Approx(1.5));
  CHECK(p(0, 1) == doctest::Approx(0.0));

  CHECK(ProxOracle::indicator_nonneg().prox(1.0, Matrix(-Matrix::Identity(3, 3))).norm() == 0.0);

  const Matrix any = ts::random_symmetric(4, 1);
  CHECK(ProxOracle::zero().prox(2.0, any).isApprox(any));

  Matrix b(2, 2);
  b << -0.9, 0.2, 0.2, -0.1;
  CHECK(ProxOracle::indicator_box(-0.4).prox(1.0, b)(0, 0) == doctest::Approx(-0.4));
}

TEST_CASE("t_map closed forms and Moreau identity") {
  const Matrix x = ts::random_symmetric(5, 2);
  const Matrix z = ts::random_symmetric(5, 3);
  const double sigma = 1.7;

  CHECK(ProxOracle::zero().t_map(sigma, z, x).norm() == 0.0);

  {  // clamp: entry 0.25 at lambda/sigma = 0.1 saturates
    ProxOracle h = ProxOracle::l1(0.1);
    Matrix v(1, 1);
    v << 0.25;
    CHECK(h.t_map_from_shift(1.0, v)(0, 0) == doctest::Approx(0.1));
  }

  for (const auto& h : {ProxOracle::l1(0.7), ProxOracle::indicator_nonneg(),
                        ProxOracle::indicator_box(-0.3), ProxOracle::zero()}) {
    const Matrix v = x - z / sigma;
    const Matrix lhs = h.t_map(sigma, z, x) + h.prox(1.0 / sigma, v);
    CHECK((lhs - v).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("Moreau identity prox_th(x) + t prox_{h*/t}(x/t) = x") {
  // prox_{h*/t} evaluated from the closed-form conjugates, independently of
  // the prox implementation under test: for L1 the conjugate is the box
  // indicator (projection = clamp), for the nonneg indicator it is the
  // nonpositive cone (projection = min with 0).
  for (int trial = 0; trial < 6; ++trial) {
    const Matrix x = ts::random_symmetric(6, 50 + trial);
    const double t = 0.3 + 0.4 * trial;
    {
      const double lam = 0.4;
      const Matrix conj_prox = (x / t).cwiseMax(-lam).cwiseMin(lam);
      const Matrix lhs = ProxOracle::l1(lam).prox(t, x) + t * conj_prox;
      CHECK((lhs - x).cwiseAbs().maxCoeff() < 1e-12);
    }
    {
      const Matrix conj_prox = (x / t).cwiseMin(0.0);
      const Matrix lhs = ProxOracle::indicator_nonneg().prox(t, x) + t * conj_prox;
      CHECK((lhs - x).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
}

TEST_CASE("prox nonexpansiveness") {
  for (const auto& h : {ProxOracle::l1(0.9), ProxOracle::indicator_nonneg(),
                        ProxOracle::indicator_box(-0.2)}) {
    for (int trial = 0; trial < 8; ++trial) {
      const Matrix a = ts::random_symmetric(5, 200 + trial);
      const Matrix b = ts::random_symmetric(5, 300 + trial);
      CHECK((h.prox(1.3, a) - h.prox(1.3, b)).norm() <= (a - b).norm() + 1e-14);
    }
  }
}

TEST_CASE("envelope value and gradient sigma*T by finite differences") {
  const double sigma = 2.1;
  const Matrix z = ts::random_symmetric(4, 4);

  CHECK(ProxOracle::zero().envelope_value(sigma, z, ts::random_symmetric(4, 5)) == 0.0);

  {  // interior of the nonneg cone: envelope vanishes
    const Matrix x = z / sigma + Matrix::Ones(4, 4);
    CHECK(ProxOracle::indicator_nonneg().envelope_value(sigma, z, x) == doctest::Approx(0.0));
  }

  for (const auto& h : {ProxOracle::l1(0.6), ProxOracle::indicator_nonneg()}) {
    const Matrix x = ts::random_symmetric(4, 6);
    const Matrix grad = sigma * h.t_map(sigma, z, x);
    const double step = 1e-6;
    double worst = 0.0;
    for (int trial = 0; trial < 5; ++trial) {
      const Matrix dir = ts::random_symmetric(4, 700 + trial);
      const double fd = (h.envelope_value(sigma, z, x + step * dir) -
                         h.envelope_value(sigma, z, x - step * dir)) /
                        (2 * step);
      const double an = grad.cwiseProduct(dir).sum();
      worst = std::max(worst, std::abs(fd - an) / (1.0 + std::abs(an)));
    }
    CHECK(worst < 1e-6);
  }
}

TEST_CASE("jacobian element: masks, kink policy, norm bound") {
  const double sigma = 1.0;
  const Matrix z = Matrix::Zero(3, 3);

  CHECK(ProxOracle::zero().jacobian_element_action(sigma, z, ts::random_symmetric(3, 7),
                                                   ts::random_symmetric(3, 8)).norm() == 0.0);

  {  // all entries beyond the threshold: action vanishes
    ProxOracle h = ProxOracle::l1(0.1);
    const Matrix x = 5.0 * Matrix::Ones(3, 3);
    CHECK(h.jacobian_element_action(sigma, z, x, ts::random_symmetric(3, 9)).norm() == 0.0);
  }

  {  // entries exactly at the threshold keep mask value 1
    ProxOracle h = ProxOracle::l1(0.5);
    Matrix x(1, 1);
    x << 0.5;
    CHECK(h.jacobian_mask(sigma, x)(0, 0) == 1.0);
    Matrix x0(1, 1);
    x0 << 0.0;
    CHECK(ProxOracle::indicator_nonneg().jacobian_mask(sigma, x0)(0, 0) == 1.0);
  }

  // ||P[D]||_F <= ||D||_F, and the mask is an idempotent self-adjoint
  // elementwise projection.
  const Matrix z5 = Matrix::Zero(5, 5);
  for (const auto& h : {ProxOracle::l1(0.4), ProxOracle::indicator_nonneg(),
                        ProxOracle::indicator_box(-0.5)}) {
    for (int trial = 0; trial < 50; ++trial) {
      const Matrix x = ts::random_symmetric(5, 1000 + trial);
      const Matrix d = ts::random_symmetric(5, 2000 + trial);
      const Matrix e = ts::random_symmetric(5, 3000 + trial);
      const Matrix pd = h.jacobian_element_action(sigma, z5, x, d);
      CHECK(pd.norm() <= d.norm() + 1e-14);
      const Matrix ppd = h.jacobian_element_action(sigma, z5, x, pd);
      CHECK((ppd - pd).norm() < 1e-14);
      const double self_adjoint =
          pd.cwiseProduct(e).sum() - d.cwiseProduct(h.jacobian_element_action(sigma, z5, x, e)).sum();
      CHECK(std::abs(self_adjoint) < 1e-12);
      const Matrix mask = h.jacobian_mask(sigma, x);
      CHECK(((mask.array() == 0.0) || (mask.array() == 1.0)).all());
    }
  }
}

TEST_CASE("conjugate values and violations") {
  {  // L1
    ProxOracle h = ProxOracle::l1(1.0);
    Matrix y = 0.9 * Matrix::Identity(2, 2);
    auto c = h.conjugate_value(y);
    CHECK(c.feasible);
    CHECK(c.value == 0.0);
    y(0, 0) = 1.3;
    c = h.conjugate_value(y);
    CHECK_FALSE(c.feasible);
    CHECK(c.violation == doctest::Approx(0.3));
  }
  {  // nonneg
    auto c = ProxOracle::indicator_nonneg().conjugate_value(Matrix(-Matrix::Identity(3, 3)));
    CHECK(c.feasible);
    CHECK(c.value == 0.0);
  }
  {  // zero
    auto c = ProxOracle::zero().conjugate_value(Matrix::Zero(2, 2));
    CHECK(c.feasible);
    c = ProxOracle::zero().conjugate_value(0.25 * Matrix::Ones(2, 2));
    CHECK(c.violation == doctest::Approx(0.25));
  }
  {  // box: finite part l * sum(Y) on the feasible side
    Matrix y(2, 2);
    y << -1.0, -0.5, -0.5, 0.0;
    auto c = ProxOracle::indicator_box(-0.4).conjugate_value(y);
    CHECK(c.feasible);
    CHECK(c.value == doctest::Approx(-0.4 * y.sum()));
  }
}

TEST_CASE("scale preconditions") {
  const Matrix w = Matrix::Zero(2, 2);
  CHECK_THROWS_AS(ProxOracle::l1(1.0).prox(0.0, w), std::invalid_argument);
  CHECK_THROWS_AS(ProxOracle::l1(1.0).t_map(-1.0, w, w), std::invalid_argument);
  CHECK_THROWS_AS(ProxOracle::l1(1.0).envelope_value(0.0, w, w), std::invalid_argument);
  CHECK_THROWS_AS(ProxOracle::l1(-0.5), std::invalid_argument);
}
