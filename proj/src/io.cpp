#include "sdpdal/io.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "sdpdal/spectral.hpp"

namespace sdpdal {

namespace {

using nlohmann::json;

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << text;
}

[[noreturn]] void parse_fail(const std::string& what, int line_no) {
  throw std::runtime_error(what + " (line " + std::to_string(line_no) + ")");
}

}  // namespace

Graph parse_graph_rudy(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  int n = -1;
  long m = -1;
  std::vector<Graph::Edge> edges;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string first;
    if (!(ls >> first)) continue;  // blank line
    if (n < 0) {
      std::istringstream hdr(line);
      if (!(hdr >> n >> m) || n <= 0 || m < 0) parse_fail("malformed rudy header", line_no);
      edges.reserve(m);
      continue;
    }
    std::istringstream es(line);
    int i, j;
    double w;
    std::string extra;
    if (!(es >> i >> j >> w) || (es >> extra)) parse_fail("malformed rudy edge line", line_no);
    if (i < 1 || i > n || j < 1 || j > n) parse_fail("vertex id out of range", line_no);
    if (i == j) parse_fail("self-loop", line_no);
    edges.push_back({i - 1, j - 1, w});
  }
  if (n < 0) throw std::runtime_error("empty rudy file");
  if (static_cast<long>(edges.size()) != m)
    throw std::runtime_error("rudy header announces " + std::to_string(m) + " edges, found " +
                             std::to_string(edges.size()));
  try {
    return Graph::make(n, std::move(edges));
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error(std::string("invalid graph: ") + e.what());
  }
}

std::string write_graph_rudy(const Graph& g) {
  std::ostringstream out;
  out << g.n << ' ' << g.edges.size() << '\n';
  out.precision(17);
  for (const auto& e : g.edges) out << e.i + 1 << ' ' << e.j + 1 << ' ' << e.w << '\n';
  return out.str();
}

Graph load_graph_rudy(const std::string& path) { return parse_graph_rudy(read_file(path)); }

SymMatrix parse_dense_matrix(const std::string& text) {
  std::istringstream in(text);
  std::vector<double> vals;
  double v;
  while (in >> v) vals.push_back(v);
  if (vals.empty()) throw std::runtime_error("empty matrix text");
  auto is_square = [](std::size_t k) {
    const auto r = static_cast<std::size_t>(std::lround(std::sqrt(double(k))));
    return r * r == k ? static_cast<int>(r) : -1;
  };
  int n = is_square(vals.size());
  std::size_t offset = 0;
  if (n < 0) {
    // Optional leading dimension token.
    const int n0 = static_cast<int>(std::lround(vals[0]));
    if (n0 > 0 && vals.size() == 1 + static_cast<std::size_t>(n0) * n0) {
      n = n0;
      offset = 1;
    }
  }
  if (n < 0) throw std::runtime_error("matrix text is not n x n");
  Matrix m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = vals[offset + static_cast<std::size_t>(i) * n + j];
  return SymMatrix::from_dense(m);
}

SymMatrix load_dense_matrix(const std::string& path) {
  return parse_dense_matrix(read_file(path));
}

SdpaProblem parse_sdpa_sparse(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<std::string> data_lines;
  int line_no = 0;
  std::vector<int> data_line_no;
  while (std::getline(in, line)) {
    ++line_no;
    std::size_t pos = line.find_first_not_of(" \t\r");
    if (pos == std::string::npos) continue;
    if (line[pos] == '*' || line[pos] == '"') continue;
    data_lines.push_back(line);
    data_line_no.push_back(line_no);
  }
  if (data_lines.size() < 4) throw std::runtime_error("sdpa: truncated file");

  auto numbers = [](const std::string& s) {
    std::string cleaned = s;
    for (char& c : cleaned)
      if (c == ',' || c == '{' || c == '}' || c == '(' || c == ')') c = ' ';
    std::istringstream ls(cleaned);
    std::vector<double> out;
    double x;
    while (ls >> x) out.push_back(x);
    return out;
  };

  const auto mdeclv = numbers(data_lines[0]);
  if (mdeclv.empty()) parse_fail("sdpa: missing constraint count", data_line_no[0]);
  const int m = static_cast<int>(mdeclv[0]);
  const auto nblocksv = numbers(data_lines[1]);
  if (nblocksv.empty()) parse_fail("sdpa: missing block count", data_line_no[1]);
  const int nblocks = static_cast<int>(nblocksv[0]);
  const auto sizes = numbers(data_lines[2]);
  if (static_cast<int>(sizes.size()) != nblocks)
    parse_fail("sdpa: block size list length mismatch", data_line_no[2]);
  if (nblocks != 1)
    throw std::runtime_error("sdpa: only a single PSD block is supported (found " +
                             std::to_string(nblocks) + " blocks)");
  if (sizes[0] < 0)
    throw std::runtime_error("sdpa: diagonal (negative-size) blocks are not supported");
  const int n = static_cast<int>(sizes[0]);
  if (n <= 0) throw std::runtime_error("sdpa: empty block");

  const auto bvals = numbers(data_lines[3]);
  if (static_cast<int>(bvals.size()) != m)
    parse_fail("sdpa: right-hand side length mismatch", data_line_no[3]);

  std::vector<std::vector<SymMatrix::Entry>> trips(m + 1);
  for (std::size_t li = 4; li < data_lines.size(); ++li) {
    const auto vals = numbers(data_lines[li]);
    if (vals.empty()) continue;
    if (vals.size() != 5) parse_fail("sdpa: malformed entry line", data_line_no[li]);
    const int matno = static_cast<int>(vals[0]);
    const int blkno = static_cast<int>(vals[1]);
    const int i = static_cast<int>(vals[2]);
    const int j = static_cast<int>(vals[3]);
    if (matno < 0 || matno > m) parse_fail("sdpa: matrix index out of range", data_line_no[li]);
    if (blkno != 1) parse_fail("sdpa: block index out of range", data_line_no[li]);
    if (i < 1 || i > n || j < 1 || j > n)
      parse_fail("sdpa: entry index out of range", data_line_no[li]);
    trips[matno].push_back({i - 1, j - 1, vals[4]});
  }

  SdpaProblem out;
  out.n = n;
  out.c = SymMatrix::from_triplets(n, std::move(trips[0]));
  out.b = Vector(m);
  for (int k = 0; k < m; ++k) {
    out.b[k] = bvals[k];
    out.constraints.push_back(SymMatrix::from_triplets(n, std::move(trips[k + 1])));
  }
  return out;
}

SdpaProblem load_sdpa_sparse(const std::string& path) {
  return parse_sdpa_sparse(read_file(path));
}

namespace {

json optional_to_json(const std::optional<double>& v) {
  return v ? json(*v) : json(nullptr);
}
std::optional<double> optional_from_json(const json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<double>();
}

}  // namespace

std::string RunReport::to_json() const {
  json j;
  j["schema_version"] = schema_version;
  j["instance"] = instance;
  j["problem_class"] = problem_class;
  j["solver"] = solver;
  j["n"] = n;
  j["p"] = p;
  j["m"] = m;
  j["m0"] = m0;
  j["m_ineq"] = m_ineq;
  j["obj_p"] = obj_p;
  j["obj_d"] = optional_to_json(obj_d);
  j["eta_p"] = eta_p;
  j["eta_z"] = eta_z;
  j["eta_d"] = eta_d;
  j["eta_k"] = eta_k;
  j["eta_kstar"] = eta_kstar;
  j["eta_c1"] = eta_c1;
  j["eta_g"] = optional_to_json(eta_g);
  j["eta_c2"] = optional_to_json(eta_c2);
  j["eta_c3"] = optional_to_json(eta_c3);
  j["eta_max"] = eta_max;
  j["rank"] = rank;
  j["lambda_min_s"] = lambda_min_s;
  j["wall_seconds"] = wall_seconds;
  j["outer_iters"] = outer_iters;
  j["inner_iters"] = inner_iters;
  j["cg_iters"] = cg_iters;
  j["converged"] = converged;
  j["rank_deficient_certificate"] = rank_deficient_certificate;
  j["gap_bound_full"] = gap_bound_full;
  j["gap_bound_refined"] = gap_bound_refined;
  j["seed"] = seed;
  j["options_echo"] = options_echo;
  return j.dump(2);
}

RunReport RunReport::from_json(const std::string& text) {
  const json j = json::parse(text);
  RunReport r;
  r.schema_version = j.at("schema_version").get<int>();
  r.instance = j.at("instance").get<std::string>();
  r.problem_class = j.at("problem_class").get<std::string>();
  r.solver = j.at("solver").get<std::string>();
  r.n = j.at("n").get<int>();
  r.p = j.at("p").get<int>();
  r.m = j.at("m").get<int>();
  r.m0 = j.at("m0").get<int>();
  r.m_ineq = j.at("m_ineq").get<int>();
  r.obj_p = j.at("obj_p").get<double>();
  r.obj_d = optional_from_json(j.at("obj_d"));
  r.eta_p = j.at("eta_p").get<double>();
  r.eta_z = j.at("eta_z").get<double>();
  r.eta_d = j.at("eta_d").get<double>();
  r.eta_k = j.at("eta_k").get<double>();
  r.eta_kstar = j.at("eta_kstar").get<double>();
  r.eta_c1 = j.at("eta_c1").get<double>();
  r.eta_g = optional_from_json(j.at("eta_g"));
  r.eta_c2 = optional_from_json(j.at("eta_c2"));
  r.eta_c3 = optional_from_json(j.at("eta_c3"));
  r.eta_max = j.at("eta_max").get<double>();
  r.rank = j.at("rank").get<int>();
  r.lambda_min_s = j.at("lambda_min_s").get<double>();
  r.wall_seconds = j.at("wall_seconds").get<double>();
  r.outer_iters = j.at("outer_iters").get<int>();
  r.inner_iters = j.at("inner_iters").get<int>();
  r.cg_iters = j.at("cg_iters").get<int>();
  r.converged = j.at("converged").get<bool>();
  r.rank_deficient_certificate = j.at("rank_deficient_certificate").get<bool>();
  r.gap_bound_full = j.at("gap_bound_full").get<double>();
  r.gap_bound_refined = j.at("gap_bound_refined").get<double>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.options_echo = j.at("options_echo").get<std::map<std::string, double>>();
  return r;
}

RunReport make_run_report(const SdpProblem& prob, const Solution& sol, const std::string& instance,
                          const std::string& problem_class, const SolveOptions& opts) {
  RunReport r;
  r.instance = instance;
  r.problem_class = problem_class;
  r.n = prob.n();
  r.p = sol.p_final;
  r.m = prob.m();
  r.m0 = prob.manifold.m0();
  r.m_ineq = prob.m_ineq();
  r.obj_p = sol.report.obj_p;
  r.obj_d = sol.report.obj_d;
  r.eta_p = sol.report.eta_p;
  r.eta_z = sol.report.eta_z;
  r.eta_d = sol.report.eta_d;
  r.eta_k = sol.report.eta_k;
  r.eta_kstar = sol.report.eta_kstar;
  r.eta_c1 = sol.report.eta_c1;
  r.eta_g = sol.report.eta_g;
  r.eta_c2 = sol.report.eta_c2;
  r.eta_c3 = sol.report.eta_c3;
  r.eta_max = sol.report.eta_max;
  r.rank = sol.report.rank;
  r.lambda_min_s = sol.report.lambda_min_s;
  r.wall_seconds = sol.wall_seconds;
  r.outer_iters = sol.outer_iters;
  r.inner_iters = sol.inner_iters;
  r.cg_iters = sol.cg_iters;
  r.converged = sol.converged;
  r.rank_deficient_certificate = sol.rank_deficient_certificate;
  r.gap_bound_full = sol.gap.bound_full;
  r.gap_bound_refined = sol.gap.bound_refined;
  r.seed = opts.seed;
  r.options_echo["eps_tol"] = opts.eps_tol;
  r.options_echo["sigma0"] = opts.sigma0;
  r.options_echo["alpha"] = opts.alpha;
  r.options_echo["max_outer"] = opts.max_outer;
  return r;
}

void save_run_report(const RunReport& rep, const std::string& path) {
  write_file(path, rep.to_json() + "\n");
}

RunReport load_run_report(const std::string& path) {
  return RunReport::from_json(read_file(path));
}

std::vector<ProfileCurve> performance_profile(const std::vector<RunReport>& reports,
                                              ProfileMetric metric) {
  std::map<std::string, std::map<std::string, double>> by_solver;  // solver -> instance -> t
  std::map<std::string, int> instance_count;
  for (const auto& r : reports) {
    if (!r.converged) continue;  // failed runs get r = infinity
    const double t = metric == ProfileMetric::Time ? r.wall_seconds : r.eta_max;
    by_solver[r.solver][r.instance] = t;
  }
  std::map<std::string, bool> solver_seen;
  std::map<std::string, int> instance_seen;
  for (const auto& r : reports) {
    solver_seen[r.solver] = true;
    instance_seen[r.instance]++;
  }
  if (solver_seen.size() < 2)
    throw std::invalid_argument("performance_profile: need at least two solver labels");
  bool any_shared = false;
  for (const auto& [inst, cnt] : instance_seen) any_shared |= cnt >= 2;
  if (!any_shared)
    throw std::invalid_argument("performance_profile: instance sets are disjoint");

  const int total = static_cast<int>(instance_seen.size());
  // Per-instance best among successful runs.
  std::map<std::string, double> best;
  for (const auto& [solver, inst_map] : by_solver)
    for (const auto& [inst, t] : inst_map) {
      auto it = best.find(inst);
      if (it == best.end() || t < it->second) best[inst] = t;
    }

  std::map<std::string, std::vector<double>> log_ratios;
  std::vector<double> taus{0.0};
  for (const auto& [solver, _] : solver_seen) {
    auto& lr = log_ratios[solver];
    const auto it = by_solver.find(solver);
    if (it != by_solver.end())
      for (const auto& [inst, t] : it->second) {
        const double denom = best.at(inst);
        const double ratio = denom > 0.0 ? t / denom : (t > 0.0 ? INFINITY : 1.0);
        const double tau = std::log2(std::max(ratio, 1.0));
        lr.push_back(tau);
        taus.push_back(tau);
      }
    std::sort(lr.begin(), lr.end());
  }
  std::sort(taus.begin(), taus.end());
  taus.erase(std::unique(taus.begin(), taus.end()), taus.end());

  std::vector<ProfileCurve> curves;
  for (const auto& [solver, lr] : log_ratios) {
    ProfileCurve c;
    c.solver = solver;
    for (double tau : taus) {
      const auto cnt = std::upper_bound(lr.begin(), lr.end(), tau) - lr.begin();
      c.samples.emplace_back(tau, static_cast<double>(cnt) / total);
    }
    curves.push_back(std::move(c));
  }
  return curves;
}

std::string profiles_to_json(const std::vector<ProfileCurve>& curves) {
  json j = json::array();
  for (const auto& c : curves) {
    json jc;
    jc["solver"] = c.solver;
    jc["samples"] = json::array();
    for (const auto& [tau, pi] : c.samples) jc["samples"].push_back({tau, pi});
    j.push_back(jc);
  }
  return j.dump(2);
}

namespace {

// Lagrangian L(X) = f(X) - y'(A_E(X)-b) + y_I'(A_I(X)-b_I) - <Z, X> whose
// Riemannian gradient is the 2RS constructed in the KKT report.
double lagrangian_value(const SdpProblem& prob, const Vector& y, const Vector& y_ineq,
                        const Matrix* z, const FactorMatrix& r) {
  const Matrix x = r.transpose() * r;
  double v = prob.f.value(r, &x);
  if (prob.m() > 0) v -= y.dot(prob.eq.apply_dense(x) - prob.b);
  if (prob.m_ineq() > 0) v += y_ineq.dot(prob.ineq.apply_dense(x) - prob.b_ineq);
  if (z && z->size() > 0) v -= z->cwiseProduct(x).sum();
  return v;
}

}  // namespace

VerificationRecord verify_instance(const SdpProblem& prob, const Solution& sol,
                                   const RunReport& rep, const SolveOptions& opts,
                                   bool run_oracle) {
  VerificationRecord rec;

  const Matrix* w = sol.w.size() ? &sol.w : nullptr;
  const Matrix* z = sol.z.size() ? &sol.z : nullptr;
  const KktReport fresh = kkt_report(prob, sol.r, w, sol.y, sol.y_ineq, z, opts);
  rec.eta_max_recomputed = fresh.eta_max;
  rec.eta_consistent =
      std::abs(fresh.eta_max - rep.eta_max) <= 1e-6 * (1.0 + std::abs(rep.eta_max)) &&
      std::abs(fresh.eta_p - rep.eta_p) <= 1e-6 * (1.0 + rep.eta_p) &&
      std::abs(fresh.obj_p - rep.obj_p) <= 1e-8 * (1.0 + std::abs(rep.obj_p));

  // Finite-difference audit of the Lagrangian gradient 2RS along random
  // tangent directions.
  {
    const auto view_y = sol.y;
    Matrix m_grad;  // 2 R S
    {
      // Reuse the report's construction through a one-off dense product.
      const Matrix x = sol.r.transpose() * sol.r;
      Matrix grad_phi = prob.f.grad_dense(sol.r, &x);
      if (prob.m() > 0) prob.eq.adjoint_add_dense(sol.y, grad_phi, -1.0);
      if (prob.m_ineq() > 0) prob.ineq.adjoint_add_dense(sol.y_ineq, grad_phi, 1.0);
      if (z) grad_phi -= *z;
      const FactorMatrix rm = sol.r * grad_phi;
      const auto ucache = make_usolve_cache(prob.manifold, sol.r);
      const Vector u = solve_u(prob.manifold, ucache, sol.r, rm);
      m_grad = riem_grad(prob.manifold, sol.r, 2.0 * rm, u);
    }
    std::mt19937_64 gen(opts.seed + 99);
    std::normal_distribution<double> gauss(0.0, 1.0);
    double worst = 0.0;
    for (int trial = 0; trial < 5; ++trial) {
      FactorMatrix dir(sol.r.rows(), sol.r.cols());
      for (int c = 0; c < dir.cols(); ++c)
        for (int rr = 0; rr < dir.rows(); ++rr) dir(rr, c) = gauss(gen);
      dir = project_tangent(prob.manifold, sol.r, dir);
      const double dn = dir.norm();
      if (dn < 1e-12) continue;
      dir /= dn;
      const double t = 1e-5;
      const auto rp = retract(prob.manifold, sol.r, t * dir);
      const auto rm2 = retract(prob.manifold, sol.r, -t * dir);
      if (!rp || !rm2) continue;
      const double fd = (lagrangian_value(prob, view_y, sol.y_ineq, z, *rp) -
                         lagrangian_value(prob, view_y, sol.y_ineq, z, *rm2)) /
                        (2.0 * t);
      const double an = (m_grad.array() * dir.array()).sum();
      worst = std::max(worst, std::abs(fd - an) / (1.0 + std::abs(an)));
    }
    rec.grad_fd_error = worst;
    rec.grad_ok = worst <= 1e-5;
  }

  if (run_oracle) {
    SdpProblem oracle = prob;
    oracle.p = prob.n();
    SolveOptions oopts = opts;
    oopts.seed = opts.seed + 1;
    oopts.enable_rank_escape = false;
    const Solution osol = solve(oracle, oopts);
    rec.oracle_obj = osol.report.obj_p;
    rec.oracle_gap = sol.report.obj_p - osol.report.obj_p;
    rec.oracle_ok = std::abs(*rec.oracle_gap) <= 10.0 * opts.eps_tol * (1.0 + std::abs(sol.report.obj_p));
  }
  rec.passed = rec.eta_consistent && rec.grad_ok && rec.oracle_ok;
  return rec;
}

// ---------------------------------------------------------------------------
// CLI
// ---------------------------------------------------------------------------

namespace {

struct CommonFlags {
  double tol = 5e-6;
  int rank = -1;
  std::uint64_t seed = 0;
  int max_outer = 300;
  std::string json_out;
  bool oracle = false;
  std::string label = "sdpdal";
};

void add_common(CLI::App* cmd, CommonFlags& cf) {
  cmd->add_option("--tol", cf.tol, "KKT tolerance on eta_max");
  cmd->add_option("--rank", cf.rank, "factorization rank p (default: problem heuristic)");
  cmd->add_option("--seed", cf.seed, "random seed");
  cmd->add_option("--max-outer", cf.max_outer, "outer iteration cap");
  cmd->add_option("--json", cf.json_out, "write the run report to this path");
  cmd->add_flag("--oracle", cf.oracle, "verify with a p = n re-solve");
  cmd->add_option("--label", cf.label, "solver label recorded in the report");
}

SolveOptions make_opts(const CommonFlags& cf) {
  SolveOptions opts;
  opts.eps_tol = cf.tol;
  opts.seed = cf.seed;
  opts.max_outer = cf.max_outer;
  return opts;
}

std::string basename_of(const std::string& path) {
  auto pos = path.find_last_of("/\\");
  std::string base = pos == std::string::npos ? path : path.substr(pos + 1);
  if (auto dot = base.find_last_of('.'); dot != std::string::npos) base = base.substr(0, dot);
  return base;
}

EntropyKind entropy_from_string(const std::string& s) {
  if (s == "none") return EntropyKind::None;
  if (s == "tsallis") return EntropyKind::Tsallis2;
  if (s == "renyi") return EntropyKind::Renyi3;
  throw CLI::ValidationError("--entropy", "must be one of none|tsallis|renyi");
}

SymMatrix random_spca_matrix(int n, std::uint64_t seed) {
  // L = u u^T / ||u||^2 + 2 V V^T with u = (1, 1/2, ..., 1/n), V uniform [0,1].
  Vector u(n);
  for (int i = 0; i < n; ++i) u[i] = 1.0 / (i + 1);
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Matrix v(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) v(i, j) = unif(gen);
  const Matrix l = u * u.transpose() / u.squaredNorm() + 2.0 * v * v.transpose();
  return SymMatrix::from_dense(l);
}

int report_and_exit(const SdpProblem& prob, const Solution& sol, const std::string& instance,
                    const std::string& cls, const SolveOptions& opts, const CommonFlags& cf,
                    const Graph* graph) {
  RunReport rep = make_run_report(prob, sol, instance, cls, opts);
  rep.solver = cf.label;

  std::cout << cls << " " << instance << ": n=" << rep.n << " p=" << rep.p << " m=" << rep.m
            << " m0=" << rep.m0 << " mI=" << rep.m_ineq << "\n";
  std::cout << "  obj_P = " << rep.obj_p;
  if (rep.obj_d) std::cout << "  obj_D = " << *rep.obj_d;
  std::cout << "\n  eta_p=" << rep.eta_p << " eta_Z=" << rep.eta_z << " eta_d=" << rep.eta_d
            << " eta_K*=" << rep.eta_kstar << " eta_C1=" << rep.eta_c1;
  if (rep.eta_g) std::cout << " eta_g=" << *rep.eta_g;
  if (rep.eta_c2) std::cout << " eta_C2=" << *rep.eta_c2;
  if (rep.eta_c3) std::cout << " eta_C3=" << *rep.eta_c3;
  std::cout << "\n  eta_max = " << rep.eta_max << (sol.converged ? "  (success)" : "  (cap hit)")
            << "\n  rank(R) = " << rep.rank << "  lambda_min(S) = " << rep.lambda_min_s
            << "  outer/inner/cg = " << rep.outer_iters << "/" << rep.inner_iters << "/"
            << rep.cg_iters << "  time = " << rep.wall_seconds << "s\n";
  if (sol.rank_deficient_certificate)
    std::cout << "  certificate: rank-deficient stationary point (global for the subproblem)\n";
  std::cout << "  gap bound (full/refined) = " << sol.gap.bound_full << " / "
            << sol.gap.bound_refined << "\n";

  if (graph) {
    const RoundedCut cut = round_cut(*graph, sol.r, 100, cf.seed);
    std::cout << "  rounded cut (best of 100) = " << cut.value << "\n";
    if (auto best = gset_best_known(instance))
      std::cout << "  gap% vs best known " << *best << " = " << gap_percent(*best, cut.value)
                << "\n";
  }

  if (cf.oracle) {
    const VerificationRecord rec = verify_instance(prob, sol, rep, opts, true);
    std::cout << "  verify: eta " << (rec.eta_consistent ? "ok" : "MISMATCH") << ", grad fd err "
              << rec.grad_fd_error << (rec.grad_ok ? " ok" : " FAIL");
    if (rec.oracle_obj)
      std::cout << ", oracle obj " << *rec.oracle_obj << " gap " << *rec.oracle_gap
                << (rec.oracle_ok ? " ok" : " FAIL");
    std::cout << "\n";
    if (!rec.passed) return 2;
  }

  if (!cf.json_out.empty()) save_run_report(rep, cf.json_out);
  return sol.converged ? 0 : 2;
}

}  // namespace

int run_cli(int argc, char** argv) {
  if (const char* threads = std::getenv("SDPDAL_NUM_THREADS"))
    Eigen::setNbThreads(std::max(1, std::atoi(threads)));

  CLI::App app{"low-rank SDP solver (augmented Lagrangian + Riemannian semismooth Newton)"};
  app.require_subcommand(1);

  // maxcut
  auto* mc = app.add_subcommand("maxcut", "max-cut SDP relaxation");
  std::string mc_graph;
  int mc_cuts = 0;
  std::string mc_entropy = "none";
  double mc_lambda = 0.0;
  CommonFlags mc_cf;
  mc->add_option("--graph", mc_graph, "rudy graph file")->required();
  mc->add_option("--cuts", mc_cuts, "triangle cutting planes: 0 none, -1 auto ceil(sqrt(n/2)), N explicit");
  mc->add_option("--entropy", mc_entropy, "entropy penalty: none|tsallis|renyi");
  mc->add_option("--lambda-ent", mc_lambda, "entropy weight (<= 0: 0.1 ||C||_inf)");
  add_common(mc, mc_cf);

  // theta
  auto* th = app.add_subcommand("theta", "Lovasz theta SDP");
  std::string th_graph;
  CommonFlags th_cf;
  th->add_option("--graph", th_graph, "rudy graph file")->required();
  add_common(th, th_cf);

  // rcp
  auto* rc = app.add_subcommand("rcp", "SDP relaxation of clustering");
  std::string rc_aff;
  int rc_k = 2;
  CommonFlags rc_cf;
  rc->add_option("--affinity", rc_aff, "dense affinity matrix file")->required();
  rc->add_option("--k", rc_k, "cluster count")->required();
  add_common(rc, rc_cf);

  // ncm
  auto* nc = app.add_subcommand("ncm", "nearest correlation matrix");
  std::string nc_g, nc_h;
  double nc_box = std::numeric_limits<double>::quiet_NaN();
  CommonFlags nc_cf;
  nc->add_option("--g", nc_g, "dense data matrix G")->required();
  nc->add_option("--weights", nc_h, "dense nonnegative weight matrix H (default: all ones)");
  nc->add_option("--box-lower", nc_box, "elementwise lower bound X >= l");
  add_common(nc, nc_cf);

  // spca
  auto* sp = app.add_subcommand("spca", "sparse PCA SDP with L1 penalty");
  std::string sp_l;
  int sp_random_n = 0;
  double sp_lambda = 1.0;
  CommonFlags sp_cf;
  sp->add_option("--l", sp_l, "dense matrix L");
  sp->add_option("--random-l", sp_random_n, "generate the random instance family at this n");
  sp->add_option("--lambda", sp_lambda, "L1 weight");
  add_common(sp, sp_cf);

  // sdpa
  auto* sd = app.add_subcommand("sdpa", "solve an SDPA sparse (.dat-s) problem");
  std::string sd_file;
  CommonFlags sd_cf;
  sd->add_option("--file", sd_file, "SDPA sparse file (single PSD block)")->required();
  add_common(sd, sd_cf);

  // profile
  auto* pf = app.add_subcommand("profile", "Dolan-More performance profiles from run reports");
  std::vector<std::string> pf_reports;
  std::string pf_metric = "time";
  std::string pf_json;
  pf->add_option("--reports", pf_reports, "run-report JSON files")->required()->expected(-1);
  pf->add_option("--metric", pf_metric, "time|eta");
  pf->add_option("--json", pf_json, "write profile curves to this path");

  // verify
  auto* vf = app.add_subcommand("verify", "solve and audit one instance");
  std::string vf_class, vf_graph, vf_matrix;
  int vf_k = 2;
  double vf_lambda = 1.0;
  CommonFlags vf_cf;
  vf->add_option("--class", vf_class, "maxcut|theta|rcp|ncm|spca")->required();
  vf->add_option("--graph", vf_graph, "rudy graph file (maxcut/theta)");
  vf->add_option("--matrix", vf_matrix, "dense matrix file (rcp/ncm/spca)");
  vf->add_option("--k", vf_k, "cluster count (rcp)");
  vf->add_option("--lambda", vf_lambda, "L1 weight (spca)");
  add_common(vf, vf_cf);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    auto opt_rank = [](int r) { return r > 0 ? std::optional<int>(r) : std::nullopt; };

    if (mc->parsed()) {
      const Graph g = load_graph_rudy(mc_graph);
      const SolveOptions opts = make_opts(mc_cf);
      std::vector<CutPlane> cuts;
      if (mc_cuts != 0) {
        const int count = mc_cuts > 0 ? mc_cuts
                                      : static_cast<int>(std::ceil(std::sqrt(g.n / 2.0)));
        SolveOptions popts = opts;
        popts.eps_tol = std::max(opts.eps_tol, 1e-5);
        cuts = generate_cutting_planes(g, EntropyKind::Tsallis2, mc_lambda, count, popts);
      }
      const EntropySpec ent{entropy_from_string(mc_entropy), mc_lambda};
      const SdpProblem prob = build_maxcut(g, cuts, ent, opt_rank(mc_cf.rank));
      const Solution sol = solve(prob, opts);
      return report_and_exit(prob, sol, basename_of(mc_graph), "maxcut", opts, mc_cf, &g);
    }
    if (th->parsed()) {
      const Graph g = load_graph_rudy(th_graph);
      const SolveOptions opts = make_opts(th_cf);
      const SdpProblem prob = build_theta(g, opt_rank(th_cf.rank));
      const Solution sol = solve(prob, opts);
      return report_and_exit(prob, sol, basename_of(th_graph), "theta", opts, th_cf, nullptr);
    }
    if (rc->parsed()) {
      const SymMatrix w = load_dense_matrix(rc_aff);
      const SolveOptions opts = make_opts(rc_cf);
      const SdpProblem prob = build_rcp(w, rc_k, opt_rank(rc_cf.rank));
      const Solution sol = solve(prob, opts);
      return report_and_exit(prob, sol, basename_of(rc_aff), "rcp", opts, rc_cf, nullptr);
    }
    if (nc->parsed()) {
      const SymMatrix g = load_dense_matrix(nc_g);
      std::optional<SymMatrix> h;
      if (!nc_h.empty()) h = load_dense_matrix(nc_h);
      std::optional<double> box;
      if (!std::isnan(nc_box)) box = nc_box;
      const SolveOptions opts = make_opts(nc_cf);
      const SdpProblem prob = build_ncm(g, h ? &*h : nullptr, box, opt_rank(nc_cf.rank));
      const Solution sol = solve(prob, opts);
      return report_and_exit(prob, sol, basename_of(nc_g), "ncm", opts, nc_cf, nullptr);
    }
    if (sp->parsed()) {
      SymMatrix l = sp_random_n > 0 ? random_spca_matrix(sp_random_n, sp_cf.seed)
                                    : load_dense_matrix(sp_l);
      if (sp_random_n <= 0 && sp_l.empty())
        throw std::runtime_error("spca: provide --l or --random-l");
      const SolveOptions opts = make_opts(sp_cf);
      const SdpProblem prob = build_spca(l, sp_lambda, opt_rank(sp_cf.rank));
      const Solution sol = solve(prob, opts);
      const std::string name =
          sp_random_n > 0 ? "rand" + std::to_string(sp_random_n) : basename_of(sp_l);
      return report_and_exit(prob, sol, name, "spca", opts, sp_cf, nullptr);
    }
    if (sd->parsed()) {
      const SdpaProblem sdpa = load_sdpa_sparse(sd_file);
      // Move a trace row (A = cI) or a complete diagonal row set into B.
      const int n = sdpa.n;
      std::optional<SdpProblem> prob;
      for (std::size_t k = 0; k < sdpa.constraints.size(); ++k) {
        const auto& a = sdpa.constraints[k];
        bool is_scaled_identity = a.nnz() == n && !a.is_dense();
        double scale = 0.0;
        if (is_scaled_identity) {
          scale = a.entries().front().v;
          for (const auto& e : a.entries())
            is_scaled_identity &= e.i == e.j && e.v == scale;
        }
        if (is_scaled_identity && scale != 0.0 && sdpa.b[k] / scale > 0.0) {
          std::vector<SymMatrix> rest;
          std::vector<double> brest;
          for (std::size_t l = 0; l < sdpa.constraints.size(); ++l)
            if (l != k) {
              rest.push_back(sdpa.constraints[l]);
              brest.push_back(sdpa.b[l]);
            }
          Vector b(brest.size());
          for (std::size_t l = 0; l < brest.size(); ++l) b[l] = brest[l];
          const int m_rest = static_cast<int>(rest.size());
          SymLinearMap eq =
              rest.empty() ? SymLinearMap::empty(n) : SymLinearMap::general(n, std::move(rest));
          const int p = sd_cf.rank > 0
                            ? sd_cf.rank
                            : std::clamp(static_cast<int>(std::ceil(std::sqrt(2.0 * (m_rest + 1)))) + 1,
                                         1, n);
          prob = SdpProblem::make(SmoothOracle::linear(sdpa.c), ProxOracle::zero(), std::move(eq),
                                  b, SymLinearMap::empty(n), Vector::Zero(0),
                                  ManifoldDescriptor::frob_sphere(n, sdpa.b[k] / scale), p);
          break;
        }
      }
      if (!prob) {
        // Full diagonal set diag(X) = d with d > 0: rescale to the oblique
        // manifold via X = D^{1/2} X' D^{1/2}.
        std::vector<int> diag_rows(n, -1);
        for (std::size_t k = 0; k < sdpa.constraints.size(); ++k) {
          const auto& a = sdpa.constraints[k];
          if (a.nnz() == 1 && !a.is_dense()) {
            const auto& e = a.entries().front();
            if (e.i == e.j && e.v != 0.0) diag_rows[e.i] = static_cast<int>(k);
          }
        }
        bool all_diag = true;
        for (int i = 0; i < n; ++i) all_diag &= diag_rows[i] >= 0;
        if (all_diag && static_cast<int>(sdpa.constraints.size()) == n) {
          Vector d(n);
          bool positive = true;
          for (int i = 0; i < n; ++i) {
            const auto& e = sdpa.constraints[diag_rows[i]].entries().front();
            d[i] = sdpa.b[diag_rows[i]] / e.v;
            positive &= d[i] > 0.0;
          }
          if (positive) {
            std::vector<SymMatrix::Entry> trips;
            for (const auto& e : sdpa.c.entries())
              trips.push_back({e.i, e.j, e.v * std::sqrt(d[e.i] * d[e.j])});
            SymMatrix c_scaled = SymMatrix::from_triplets(n, std::move(trips));
            const int p = sd_cf.rank > 0
                              ? sd_cf.rank
                              : std::clamp(static_cast<int>(std::ceil(std::sqrt(2.0 * n))) + 1, 1, n);
            prob = SdpProblem::make(SmoothOracle::linear(std::move(c_scaled)), ProxOracle::zero(),
                                    SymLinearMap::empty(n), Vector::Zero(0),
                                    SymLinearMap::empty(n), Vector::Zero(0),
                                    ManifoldDescriptor::oblique(n), p);
          }
        }
      }
      if (!prob)
        throw std::runtime_error(
            "sdpa: constraints carry no trace row or complete positive diagonal; no supported "
            "manifold structure");
      const SolveOptions opts = make_opts(sd_cf);
      const Solution sol = solve(*prob, opts);
      return report_and_exit(*prob, sol, basename_of(sd_file), "sdpa", opts, sd_cf, nullptr);
    }
    if (pf->parsed()) {
      std::vector<RunReport> reports;
      for (const auto& path : pf_reports) reports.push_back(load_run_report(path));
      const ProfileMetric metric =
          pf_metric == "eta" ? ProfileMetric::EtaMax : ProfileMetric::Time;
      const auto curves = performance_profile(reports, metric);
      const std::string out = profiles_to_json(curves);
      if (!pf_json.empty())
        write_file(pf_json, out + "\n");
      else
        std::cout << out << "\n";
      return 0;
    }
    if (vf->parsed()) {
      vf_cf.oracle = true;
      const SolveOptions opts = make_opts(vf_cf);
      std::optional<SdpProblem> prob;
      std::string name;
      if (vf_class == "maxcut" || vf_class == "theta") {
        if (vf_graph.empty()) throw std::runtime_error("verify: --graph required for " + vf_class);
        const Graph g = load_graph_rudy(vf_graph);
        prob = vf_class == "maxcut" ? build_maxcut(g, {}, {}, opt_rank(vf_cf.rank))
                                    : build_theta(g, opt_rank(vf_cf.rank));
        name = basename_of(vf_graph);
      } else {
        if (vf_matrix.empty())
          throw std::runtime_error("verify: --matrix required for " + vf_class);
        const SymMatrix m = load_dense_matrix(vf_matrix);
        if (vf_class == "rcp")
          prob = build_rcp(m, vf_k, opt_rank(vf_cf.rank));
        else if (vf_class == "ncm")
          prob = build_ncm(m, nullptr, std::nullopt, opt_rank(vf_cf.rank));
        else if (vf_class == "spca")
          prob = build_spca(m, vf_lambda, opt_rank(vf_cf.rank));
        else
          throw std::runtime_error("verify: unknown class " + vf_class);
        name = basename_of(vf_matrix);
      }
      const Solution sol = solve(*prob, opts);
      return report_and_exit(*prob, sol, name, vf_class, opts, vf_cf, nullptr);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace sdpdal
