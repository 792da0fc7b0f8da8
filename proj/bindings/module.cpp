#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "sdpdal/apps.hpp"
#include "sdpdal/io.hpp"

namespace py = pybind11;
using namespace sdpdal;

namespace {

Graph graph_from_edges(int n, const std::vector<std::tuple<int, int, double>>& edges) {
  std::vector<Graph::Edge> es;
  es.reserve(edges.size());
  for (const auto& [i, j, w] : edges) es.push_back({i, j, w});
  return Graph::make(n, std::move(es));
}

SolveOptions opts_from_kwargs(double tol, std::uint64_t seed, int max_outer) {
  SolveOptions opts;
  opts.eps_tol = tol;
  opts.seed = seed;
  opts.max_outer = max_outer;
  return opts;
}

py::dict report_dict(const SdpProblem& prob, const Solution& sol) {
  py::dict d;
  d["obj_p"] = sol.report.obj_p;
  if (sol.report.obj_d) d["obj_d"] = *sol.report.obj_d;
  d["eta_p"] = sol.report.eta_p;
  d["eta_z"] = sol.report.eta_z;
  d["eta_d"] = sol.report.eta_d;
  d["eta_kstar"] = sol.report.eta_kstar;
  d["eta_c1"] = sol.report.eta_c1;
  if (sol.report.eta_g) d["eta_g"] = *sol.report.eta_g;
  if (sol.report.eta_c2) d["eta_c2"] = *sol.report.eta_c2;
  if (sol.report.eta_c3) d["eta_c3"] = *sol.report.eta_c3;
  d["eta_max"] = sol.report.eta_max;
  d["converged"] = sol.converged;
  d["rank"] = sol.report.rank;
  d["lambda_min_s"] = sol.report.lambda_min_s;
  d["outer_iters"] = sol.outer_iters;
  d["inner_iters"] = sol.inner_iters;
  d["wall_seconds"] = sol.wall_seconds;
  d["rank_deficient_certificate"] = sol.rank_deficient_certificate;
  d["gap_bound_full"] = sol.gap.bound_full;
  d["gap_bound_refined"] = sol.gap.bound_refined;
  d["R"] = Matrix(sol.r);
  d["X"] = Matrix(sol.r.transpose() * sol.r);
  d["p"] = sol.p_final;
  d["n"] = prob.n();
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Low-rank SDP solver: augmented Lagrangian with Burer-Monteiro "
            "factorization and a Riemannian semismooth Newton subsolver.";

  m.def(
      "solve_maxcut",
      [](int n, const std::vector<std::tuple<int, int, double>>& edges, int cuts,
         const std::string& entropy, double lambda_ent, int rank, double tol, std::uint64_t seed,
         int max_outer) {
        const Graph g = graph_from_edges(n, edges);
        EntropySpec ent;
        if (entropy == "tsallis")
          ent = {EntropyKind::Tsallis2, lambda_ent};
        else if (entropy == "renyi")
          ent = {EntropyKind::Renyi3, lambda_ent};
        else if (entropy != "none")
          throw std::invalid_argument("entropy must be none|tsallis|renyi");
        SolveOptions opts = opts_from_kwargs(tol, seed, max_outer);
        std::vector<CutPlane> planes;
        if (cuts != 0) {
          const int count = cuts > 0 ? cuts : static_cast<int>(std::ceil(std::sqrt(n / 2.0)));
          SolveOptions popts = opts;
          popts.eps_tol = std::max(tol, 1e-5);
          planes = generate_cutting_planes(g, EntropyKind::Tsallis2, lambda_ent, count, popts);
        }
        const SdpProblem prob =
            build_maxcut(g, planes, ent, rank > 0 ? std::optional<int>(rank) : std::nullopt);
        const Solution sol = solve(prob, opts);
        py::dict d = report_dict(prob, sol);
        const RoundedCut cut = round_cut(g, sol.r, 100, seed);
        d["rounded_cut"] = cut.value;
        d["cut_signs"] = cut.signs;
        return d;
      },
      py::arg("n"), py::arg("edges"), py::arg("cuts") = 0, py::arg("entropy") = "none",
      py::arg("lambda_ent") = 0.0, py::arg("rank") = -1, py::arg("tol") = 5e-6,
      py::arg("seed") = 0, py::arg("max_outer") = 100);

  m.def(
      "solve_theta",
      [](int n, const std::vector<std::tuple<int, int, double>>& edges, int rank, double tol,
         std::uint64_t seed, int max_outer) {
        const Graph g = graph_from_edges(n, edges);
        const SdpProblem prob =
            build_theta(g, rank > 0 ? std::optional<int>(rank) : std::nullopt);
        const Solution sol = solve(prob, opts_from_kwargs(tol, seed, max_outer));
        return report_dict(prob, sol);
      },
      py::arg("n"), py::arg("edges"), py::arg("rank") = -1, py::arg("tol") = 5e-6,
      py::arg("seed") = 0, py::arg("max_outer") = 100);

  m.def(
      "solve_rcp",
      [](const Matrix& affinity, int k, int rank, double tol, std::uint64_t seed, int max_outer) {
        const SdpProblem prob = build_rcp(SymMatrix::from_dense(affinity), k,
                                          rank > 0 ? std::optional<int>(rank) : std::nullopt);
        const Solution sol = solve(prob, opts_from_kwargs(tol, seed, max_outer));
        return report_dict(prob, sol);
      },
      py::arg("affinity"), py::arg("k"), py::arg("rank") = -1, py::arg("tol") = 5e-6,
      py::arg("seed") = 0, py::arg("max_outer") = 100);

  m.def(
      "solve_ncm",
      [](const Matrix& g_data, std::optional<Matrix> h_weights, std::optional<double> box_lower,
         int rank, double tol, std::uint64_t seed, int max_outer) {
        std::optional<SymMatrix> h;
        if (h_weights) h = SymMatrix::from_dense(*h_weights);
        const SdpProblem prob =
            build_ncm(SymMatrix::from_dense(g_data), h ? &*h : nullptr, box_lower,
                      rank > 0 ? std::optional<int>(rank) : std::nullopt);
        const Solution sol = solve(prob, opts_from_kwargs(tol, seed, max_outer));
        return report_dict(prob, sol);
      },
      py::arg("g"), py::arg("h") = std::nullopt, py::arg("box_lower") = std::nullopt,
      py::arg("rank") = -1, py::arg("tol") = 5e-6, py::arg("seed") = 0, py::arg("max_outer") = 100);

  m.def(
      "solve_spca",
      [](const Matrix& l, double lambda, int rank, double tol, std::uint64_t seed, int max_outer) {
        const SdpProblem prob = build_spca(SymMatrix::from_dense(l), lambda,
                                           rank > 0 ? std::optional<int>(rank) : std::nullopt);
        const Solution sol = solve(prob, opts_from_kwargs(tol, seed, max_outer));
        return report_dict(prob, sol);
      },
      py::arg("l"), py::arg("lambda_"), py::arg("rank") = -1, py::arg("tol") = 5e-6,
      py::arg("seed") = 0, py::arg("max_outer") = 100);

  m.def(
      "round_cut",
      [](int n, const std::vector<std::tuple<int, int, double>>& edges, const Matrix& r,
         int trials, std::uint64_t seed) {
        const Graph g = graph_from_edges(n, edges);
        const RoundedCut cut = round_cut(g, r, trials, seed);
        return py::make_tuple(cut.value, cut.signs);
      },
      py::arg("n"), py::arg("edges"), py::arg("r"), py::arg("trials") = 100, py::arg("seed") = 0);

  m.def("gap_percent", &gap_percent, py::arg("best"), py::arg("cut"));

  m.def(
      "parse_graph_rudy",
      [](const std::string& text) {
        const Graph g = parse_graph_rudy(text);
        std::vector<std::tuple<int, int, double>> edges;
        for (const auto& e : g.edges) edges.emplace_back(e.i, e.j, e.w);
        return py::make_tuple(g.n, edges);
      },
      py::arg("text"));
}
