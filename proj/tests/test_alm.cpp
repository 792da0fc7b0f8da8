#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "sdpdal/alm.hpp"
#include "sdpdal/apps.hpp"
#include "sdpdal/spectral.hpp"
#include "support.hpp"

using namespace sdpdal;
namespace ts = sdpdal::testsupport;

TEST_CASE("theta on K4: X diagonal with unit trace, obj -1") {
  SolveOptions opts;
  opts.eps_tol = 1e-8;
  const Solution sol = solve(build_theta(ts::complete_graph(4)), opts);
  CHECK(sol.converged);
  CHECK(sol.report.obj_p == doctest::Approx(-1.0).epsilon(1e-8));
  // off-diagonals pinned to zero
  const Matrix x = sol.r.transpose() * sol.r;
  CHECK((x - Matrix(x.diagonal().asDiagonal())).cwiseAbs().maxCoeff() < 1e-7);
}

TEST_CASE("theta on the empty graph: X = ee^T/n, obj -n") {
  SolveOptions opts;
  opts.eps_tol = 1e-9;
  const Solution sol = solve(build_theta(ts::empty_graph(4)), opts);
  CHECK(sol.converged);
  CHECK(sol.report.obj_p == doctest::Approx(-4.0).epsilon(1e-9));
}

TEST_CASE("maxcut on K3: obj -9/4") {
  SolveOptions opts;
  opts.eps_tol = 1e-7;
  const Solution sol = solve(build_maxcut(ts::complete_graph(3)), opts);
  CHECK(sol.converged);
  CHECK(std::abs(sol.report.obj_p - (-2.25)) < 1e-5);
  CHECK(sol.report.eta_d == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(sol.report.eta_k == 0.0);
  // I lies in span(B) on the oblique manifold: <grad Psi, R> = 0.
  CHECK(std::abs(sol.report.grad_r_inner) < 1e-10);
}

TEST_CASE("kkt_report at the exact K4-theta primal-dual pair") {
  const SdpProblem prob = build_theta(ts::complete_graph(4), 4);
  FactorMatrix r = 0.5 * Matrix::Identity(4, 4);  // X = I/4
  Vector y = Vector::Constant(prob.m(), -2.0);
  SolveOptions opts;
  const KktReport rep = kkt_report(prob, r, nullptr, y, Vector(), nullptr, opts);
  CHECK(rep.eta_p < 1e-12);
  CHECK(rep.eta_d < 1e-12);
  CHECK(rep.eta_kstar < 1e-12);
  CHECK(rep.eta_c1 < 1e-12);
  REQUIRE(rep.eta_g);
  CHECK(*rep.eta_g < 1e-12);
  CHECK(rep.eta_max < 1e-10);
  CHECK(rep.obj_p == doctest::Approx(-1.0));
  REQUIRE(rep.obj_d);
  CHECK(*rep.obj_d == doctest::Approx(-1.0));
  CHECK(rep.lambda_min_s == doctest::Approx(0.0).epsilon(1e-12));

  // Tampered multipliers get flagged through the recomputed quantities.
  Vector bad = y;
  bad[0] = 1.0;
  const KktReport tampered = kkt_report(prob, r, nullptr, bad, Vector(), nullptr, opts);
  CHECK(tampered.eta_max > 1e-3);
}

TEST_CASE("eta pieces: S = I has no negative part; X = W zeroes eta_Z") {
  CHECK(dense_eig_bounds(Matrix::Identity(5, 5)).neg_part_norm == 0.0);
  // box-NCM state with W = X exactly
  const Matrix g = ts::lowrank_corr_data(4, 2, 0.05, 7);
  const SdpProblem prob = build_ncm(SymMatrix::from_dense(g), nullptr, -0.9, 4);
  const FactorMatrix r = random_point(prob.manifold, 4, 8);
  const Matrix x = r.transpose() * r;
  const Matrix w = x;  // consistent split
  const Matrix z = Matrix::Zero(4, 4);
  SolveOptions opts;
  const KktReport rep = kkt_report(prob, r, &w, Vector(), Vector(), &z, opts);
  CHECK(rep.eta_z == 0.0);
}

TEST_CASE("dual_objective pieces") {
  {  // Linear f, h = Zero, Z = 0: obj_D = y'b + u'b0
    const SdpProblem prob = build_theta(ts::complete_graph(3), 3);
    const FactorMatrix r = random_point(prob.manifold, 3, 9);
    const Vector y = Vector::Constant(prob.m(), -2.0);
    const Matrix x = r.transpose() * r;
    Matrix m = -Matrix::Ones(3, 3);
    prob.eq.adjoint_add_dense(y, m, -1.0);
    const auto ucache = make_usolve_cache(prob.manifold, r);
    const Vector u = solve_u(prob.manifold, ucache, r, r * m);
    const auto dual = dual_objective(prob, y, Vector(), nullptr, u, r, nullptr);
    REQUIRE(dual.value);
    CHECK(*dual.value == doctest::Approx(u[0]));  // b = 0 so only u b0 remains
    CHECK(dual.conj_violation == 0.0);
  }
  {  // entropy runs carry no dual value
    const SdpProblem prob =
        build_maxcut(ts::complete_graph(3), {}, {EntropyKind::Tsallis2, 0.5});
    const FactorMatrix r = random_point(prob.manifold, 3, 10);
    const auto dual =
        dual_objective(prob, Vector(), Vector(), nullptr, Vector::Zero(3), r, nullptr);
    CHECK_FALSE(dual.value);
  }
}

TEST_CASE("sigma_alpha_update") {
  SolveOptions opts;
  // halved infeasibility: significant drop, sigma unchanged
  CHECK(sigma_alpha_update(0.5, 0.25, 2.0, 1.0, opts).first == doctest::Approx(2.0));
  // unchanged infeasibility: grow by the paper factor 1.1
  CHECK(sigma_alpha_update(0.5, 0.5, 2.0, 1.0, opts).first == doctest::Approx(2.2));
  // first iteration (no history): unchanged
  CHECK(sigma_alpha_update(std::numeric_limits<double>::infinity(), 0.9, 2.0, 1.0, opts).first ==
        doctest::Approx(2.0));
  CHECK(sigma_alpha_update(0.5, 0.5, 2.0, 1.0, opts).second == doctest::Approx(1.0));
}

TEST_CASE("gap_certificate formula") {
  {  // S >= 0 and the refinement applies: refined bound is 0
    const auto g = gap_certificate(ManifoldDescriptor::oblique(7), 1e-6, 0.0);
    CHECK(g.refinement);
    CHECK(g.bound_refined == 0.0);
    CHECK(g.diameter == doctest::Approx(7.0));
  }
  {  // FrobSphere, eps_g = 1e-6, eps_H = 0: full-formula value 5e-7
    const auto g = gap_certificate(ManifoldDescriptor::frob_sphere(5), 1e-6, 0.0);
    CHECK(g.bound_full == doctest::Approx(5e-7));
    CHECK(g.eps_h == 0.0);
  }
  {  // negative lambda_min enters as eps_H = -lambda_min
    const auto g = gap_certificate(ManifoldDescriptor::frob_sphere(5, 2.0), 0.0, -1e-3);
    CHECK(g.eps_h == doctest::Approx(1e-3));
    CHECK(g.bound_refined == doctest::Approx(2e-3));
    CHECK(g.bound_full == doctest::Approx(2e-3));
  }
  {
    const auto g = gap_certificate(ManifoldDescriptor::block_orthonormal({2, 3}), 1e-8, -1e-9);
    CHECK(g.diameter == doctest::Approx(5.0));
  }
}

TEST_CASE("solve is deterministic given the seed") {
  const SdpProblem prob = build_maxcut(ts::gnp_graph(12, 0.4, 77));
  SolveOptions opts;
  opts.seed = 5;
  const Solution a = solve(prob, opts);
  const Solution b = solve(prob, opts);
  CHECK(a.r == b.r);  // bit-identical replay
  CHECK(a.report.eta_max == b.report.eta_max);
  CHECK(a.report.obj_p == b.report.obj_p);
  opts.seed = 6;
  const Solution c = solve(prob, opts);
  CHECK(a.converged);
  CHECK(c.converged);
  CHECK(a.report.obj_p == doctest::Approx(c.report.obj_p).epsilon(1e-5));
}

TEST_CASE("identity diagnostics hold at every outer iteration") {
  const SdpProblem prob = build_theta(ts::gnp_graph(10, 0.4, 78));
  SolveOptions opts;
  opts.eps_tol = 1e-7;
  const Solution sol = solve(prob, opts);
  REQUIRE(sol.converged);
  for (const auto& rep : sol.outer_reports) {
    CHECK(rep.bxs_residual < 1e-10 * (1.0 + rep.s_norm));
    CHECK(std::abs(rep.grad_r_inner) < 1e-10 * (1.0 + rep.s_norm));
    CHECK(rep.eta_d < 1e-10);
    CHECK(rep.eta_k == 0.0);
  }
}

TEST_CASE("inequality-constrained solve: multipliers stay nonnegative, eta_C3 reported") {
  // K3 with all four triangle patterns on (0,1,2).
  std::vector<CutPlane> cuts;
  for (int pat = 0; pat < 4; ++pat) cuts.push_back({0, 1, 2, pat});
  const SdpProblem prob = build_maxcut(ts::complete_graph(3), cuts);
  SolveOptions opts;
  opts.eps_tol = 1e-6;
  const Solution sol = solve(prob, opts);
  CHECK(sol.converged);
  REQUIRE(sol.report.eta_c3);
  CHECK(*sol.report.eta_c3 < 1e-6);
  CHECK(sol.y_ineq.minCoeff() >= 0.0);
  // the +++ plane cuts the K3 optimum X_ij = -1/2 (sum -3/2 >= -1 violated),
  // so the constrained optimum is -2 instead of -9/4
  CHECK(sol.report.obj_p == doctest::Approx(-2.0).epsilon(1e-5));
}

TEST_CASE("rank-deficiency certificate on an easy instance") {
  // theta on the empty graph has the rank-one optimum ee^T/n with p = 3.
  const SdpProblem prob = build_theta(ts::empty_graph(6), 3);
  SolveOptions opts;
  opts.eps_tol = 1e-9;
  const Solution sol = solve(prob, opts);
  REQUIRE(sol.converged);
  CHECK(sol.report.rank == 1);
  CHECK(sol.rank_deficient_certificate);
  CHECK(sol.gap.bound() >= 0.0);
}

TEST_CASE("options validation") {
  SolveOptions opts;
  opts.alpha = 1.7;  // above the golden-ratio bound
  CHECK_THROWS_AS(opts.validate(), std::invalid_argument);
  opts.alpha = 1.0;
  opts.eps_tol = 0.0;
  CHECK_THROWS_AS(opts.validate(), std::invalid_argument);
}
