#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "sdpdal/io.hpp"
#include "support.hpp"

using namespace sdpdal;
namespace ts = sdpdal::testsupport;

TEST_CASE("rudy parser") {
  {
    const Graph g = parse_graph_rudy("3 3\n1 2 1\n1 3 1\n2 3 1\n");
    CHECK(g.n == 3);
    CHECK(g.edges.size() == 3);
  }
  {
    const Graph g = parse_graph_rudy("2 1\n1 2 5\n");
    CHECK(g.edges[0].w == doctest::Approx(5.0));
  }
  // header/body mismatch reports the offending count
  CHECK_THROWS_WITH_AS(parse_graph_rudy("3 2\n1 2 1\n"),
                       doctest::Contains("announces 2 edges, found 1"), std::runtime_error);
  // malformed line carries its line number
  CHECK_THROWS_WITH_AS(parse_graph_rudy("2 1\n1 two 1\n"), doctest::Contains("line 2"),
                       std::runtime_error);
  CHECK_THROWS_AS(parse_graph_rudy("2 1\n1 1 1\n"), std::runtime_error);   // self-loop
  CHECK_THROWS_AS(parse_graph_rudy("2 1\n1 3 1\n"), std::runtime_error);   // id out of range
  CHECK_THROWS_AS(parse_graph_rudy("2 2\n1 2 1\n2 1 4\n"), std::runtime_error);  // duplicate
}

TEST_CASE("rudy round-trip is the identity") {
  const Graph g = ts::gnp_graph(9, 0.4, 3);
  const Graph back = parse_graph_rudy(write_graph_rudy(g));
  REQUIRE(back.n == g.n);
  REQUIRE(back.edges.size() == g.edges.size());
  for (std::size_t i = 0; i < g.edges.size(); ++i) {
    CHECK(back.edges[i].i == g.edges[i].i);
    CHECK(back.edges[i].j == g.edges[i].j);
    CHECK(back.edges[i].w == g.edges[i].w);
  }
}

TEST_CASE("sdpa sparse parser") {
  const char* text =
      "* minimal one-constraint example\n"
      "\"another comment\n"
      "1\n"
      "1\n"
      "2\n"
      "1.0\n"
      "0 1 1 1 2.0\n"
      "0 1 1 2 0.5\n"
      "1 1 1 1 1.0\n"
      "1 1 2 2 1.0\n";
  const SdpaProblem p = parse_sdpa_sparse(text);
  CHECK(p.n == 2);
  CHECK(p.b.size() == 1);
  CHECK(p.b[0] == doctest::Approx(1.0));
  CHECK(p.c.coeff(0, 0) == doctest::Approx(2.0));
  CHECK(p.c.coeff(1, 0) == doctest::Approx(0.5));
  CHECK(p.constraints[0].trace() == doctest::Approx(2.0));

  // diagonal (negative) blocks rejected explicitly, never silently
  CHECK_THROWS_WITH_AS(parse_sdpa_sparse("1\n1\n-2\n1.0\n"),
                       doctest::Contains("diagonal"), std::runtime_error);
  CHECK_THROWS_WITH_AS(parse_sdpa_sparse("1\n2\n{2, 2}\n1.0\n"),
                       doctest::Contains("single PSD block"), std::runtime_error);
  CHECK_THROWS_AS(parse_sdpa_sparse("1\n1\n2\n1.0\n0 1 1 5 1.0\n"), std::runtime_error);
}

TEST_CASE("dense matrix parser accepts bare and dimension-prefixed forms") {
  const SymMatrix a = parse_dense_matrix("1 0.5\n0.5 2\n");
  CHECK(a.n() == 2);
  CHECK(a.coeff(1, 0) == doctest::Approx(0.5));
  const SymMatrix b = parse_dense_matrix("2\n1 0.5\n0.5 2\n");
  CHECK(b.n() == 2);
  CHECK_THROWS_AS(parse_dense_matrix("1 2 3\n"), std::runtime_error);
}

TEST_CASE("run report JSON round-trip is lossless") {
  RunReport r;
  r.instance = "k3";
  r.problem_class = "maxcut";
  r.solver = "sdpdal";
  r.n = 3;
  r.p = 3;
  r.m0 = 3;
  r.obj_p = -2.25;
  r.obj_d = -2.2500000001;
  r.eta_p = 1.25e-9;
  r.eta_g = 3.7e-12;
  r.eta_c3 = std::nullopt;
  r.eta_max = 1.25e-9;
  r.rank = 2;
  r.lambda_min_s = -3.0e-10;
  r.wall_seconds = 0.0123456789012345;
  r.outer_iters = 4;
  r.converged = true;
  r.seed = 12345678901234567ULL;
  r.options_echo["eps_tol"] = 5e-6;
  const RunReport back = RunReport::from_json(r.to_json());
  CHECK(back.instance == r.instance);
  CHECK(back.obj_p == r.obj_p);
  REQUIRE(back.obj_d);
  CHECK(*back.obj_d == *r.obj_d);
  CHECK(back.eta_p == r.eta_p);
  REQUIRE(back.eta_g);
  CHECK(*back.eta_g == *r.eta_g);
  CHECK_FALSE(back.eta_c3);
  CHECK(back.wall_seconds == r.wall_seconds);
  CHECK(back.seed == r.seed);
  CHECK(back.options_echo.at("eps_tol") == 5e-6);
  // eta_max consistent with components after the round trip
  CHECK(back.eta_max >= back.eta_p);
}

namespace {

RunReport quick_report(const std::string& solver, const std::string& instance, double t,
                       bool converged = true) {
  RunReport r;
  r.solver = solver;
  r.instance = instance;
  r.wall_seconds = t;
  r.eta_max = t;
  r.converged = converged;
  return r;
}

double curve_at(const ProfileCurve& c, double tau) {
  double v = 0.0;
  for (const auto& [t, pi] : c.samples)
    if (t <= tau + 1e-12) v = pi;
  return v;
}

}  // namespace

TEST_CASE("performance profiles") {
  {  // identical times: both curves jump to 1 at tau = 0
    const auto curves = performance_profile(
        {quick_report("a", "p1", 1.0), quick_report("b", "p1", 1.0),
         quick_report("a", "p2", 2.0), quick_report("b", "p2", 2.0)},
        ProfileMetric::Time);
    REQUIRE(curves.size() == 2);
    for (const auto& c : curves) CHECK(curve_at(c, 0.0) == doctest::Approx(1.0));
  }
  {  // one solver exactly 2x slower reaches 1 at tau = 1
    const auto curves = performance_profile(
        {quick_report("fast", "p1", 1.0), quick_report("slow", "p1", 2.0),
         quick_report("fast", "p2", 3.0), quick_report("slow", "p2", 6.0)},
        ProfileMetric::Time);
    for (const auto& c : curves) {
      if (c.solver == "slow") {
        CHECK(curve_at(c, 0.5) == doctest::Approx(0.0));
        CHECK(curve_at(c, 1.0) == doctest::Approx(1.0));
      } else {
        CHECK(curve_at(c, 0.0) == doctest::Approx(1.0));
      }
    }
  }
  {  // three instances, hand-computed ratios; failed run assigned r = inf
    const std::vector<RunReport> reports = {
        quick_report("a", "p1", 1.0), quick_report("b", "p1", 4.0),
        quick_report("a", "p2", 6.0), quick_report("b", "p2", 3.0),
        quick_report("a", "p3", 5.0), quick_report("b", "p3", 10.0, false)};
    const auto curves = performance_profile(reports, ProfileMetric::Time);
    for (const auto& c : curves) {
      if (c.solver == "a") {
        // ratios: 1, 2, 1 -> pi(0) = 2/3, pi(1) = 1
        CHECK(curve_at(c, 0.0) == doctest::Approx(2.0 / 3.0));
        CHECK(curve_at(c, 1.0) == doctest::Approx(1.0));
      } else {
        // ratios: 4, 1, inf -> pi(0) = 1/3, pi(2) = 2/3, never reaches 1
        CHECK(curve_at(c, 0.0) == doctest::Approx(1.0 / 3.0));
        CHECK(curve_at(c, 2.0) == doctest::Approx(2.0 / 3.0));
        CHECK(c.samples.back().second <= 2.0 / 3.0 + 1e-12);
      }
      // monotone step function with total mass <= 1
      double prev = -1.0;
      for (const auto& [tau, pi] : c.samples) {
        CHECK(pi >= prev);
        prev = pi;
        CHECK(pi <= 1.0 + 1e-12);
      }
    }
  }
  CHECK_THROWS_AS(performance_profile({quick_report("a", "p1", 1.0)}, ProfileMetric::Time),
                  std::invalid_argument);
  CHECK_THROWS_AS(performance_profile(
                      {quick_report("a", "p1", 1.0), quick_report("b", "p2", 1.0)},
                      ProfileMetric::Time),
                  std::invalid_argument);
}

TEST_CASE("verify_instance audits a solution and flags tampering") {
  const SdpProblem prob = build_theta(ts::cycle_graph(5));
  SolveOptions opts;
  opts.eps_tol = 1e-7;
  Solution sol = solve(prob, opts);
  REQUIRE(sol.converged);
  const RunReport rep = make_run_report(prob, sol, "c5", "theta", opts);

  const VerificationRecord ok = verify_instance(prob, sol, rep, opts, true);
  CHECK(ok.eta_consistent);
  CHECK(ok.grad_ok);
  CHECK(ok.oracle_ok);
  CHECK(ok.passed);
  REQUIRE(ok.oracle_obj);
  CHECK(std::abs(*ok.oracle_gap) < 1e-5);

  // corrupt the multiplier: recomputed eta must disagree with the report
  Solution bad = sol;
  bad.y[0] += 0.5;
  const VerificationRecord flagged = verify_instance(prob, bad, rep, opts, false);
  CHECK_FALSE(flagged.eta_consistent);
  CHECK_FALSE(flagged.passed);
}
