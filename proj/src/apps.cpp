#include "sdpdal/apps.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <random>
#include <set>
#include <stdexcept>
#include <tuple>

namespace sdpdal {

Graph Graph::make(int n, std::vector<Edge> edges) {
  if (n <= 0) throw std::invalid_argument("Graph: empty vertex set");
  std::set<std::pair<int, int>> seen;
  for (auto& e : edges) {
    if (e.i < 0 || e.i >= n || e.j < 0 || e.j >= n)
      throw std::invalid_argument("Graph: vertex id out of range");
    if (e.i == e.j) throw std::invalid_argument("Graph: self-loop");
    if (!std::isfinite(e.w)) throw std::invalid_argument("Graph: non-finite weight");
    if (e.i < e.j) std::swap(e.i, e.j);
    if (!seen.insert({e.i, e.j}).second) throw std::invalid_argument("Graph: duplicate edge");
  }
  return Graph{n, std::move(edges)};
}

double Graph::total_weight() const {
  double s = 0.0;
  for (const auto& e : edges) s += e.w;
  return s;
}

namespace {

int default_rank(long m_total, int n) {
  const int p = static_cast<int>(std::ceil(std::sqrt(2.0 * static_cast<double>(m_total)))) + 1;
  return std::clamp(p, 1, n);
}

SymMatrix maxcut_objective(const Graph& g) {
  // C = -1/4 L with L the weighted graph Laplacian.
  std::vector<SymMatrix::Entry> trips;
  Vector deg = Vector::Zero(g.n);
  for (const auto& e : g.edges) {
    deg[e.i] += e.w;
    deg[e.j] += e.w;
    trips.push_back({e.i, e.j, 0.25 * e.w});
  }
  for (int i = 0; i < g.n; ++i) trips.push_back({i, i, -0.25 * deg[i]});
  return SymMatrix::from_triplets(g.n, std::move(trips));
}

}  // namespace

SdpProblem build_maxcut(const Graph& g, const std::vector<CutPlane>& cuts,
                        const EntropySpec& entropy, std::optional<int> p) {
  if (g.edges.empty()) throw std::invalid_argument("build_maxcut: empty graph");
  const int n = g.n;
  SymMatrix c = maxcut_objective(g);

  SmoothOracle f = SmoothOracle::linear(c);
  if (entropy.kind != EntropyKind::None) {
    double lam = entropy.lambda;
    if (lam <= 0.0) lam = 0.1 * c.max_abs();
    f = SmoothOracle::linear_plus_entropy(std::move(c), entropy.kind, lam);
  }

  // Triangle rows sum >= -1 converted to the canonical <= form.
  std::vector<SymMatrix> rows;
  rows.reserve(cuts.size());
  for (const auto& cp : cuts) {
    if (!(0 <= cp.i && cp.i < cp.j && cp.j < cp.k && cp.k < n))
      throw std::invalid_argument("build_maxcut: bad cutting-plane triple");
    const auto s = cut_pattern_signs(cp.pattern);
    rows.push_back(SymMatrix::from_triplets(
        n, {{cp.j, cp.i, -0.5 * s[0]}, {cp.k, cp.i, -0.5 * s[1]}, {cp.k, cp.j, -0.5 * s[2]}}));
  }
  SymLinearMap ineq =
      rows.empty() ? SymLinearMap::empty(n) : SymLinearMap::general(n, std::move(rows));
  const Vector b_ineq = Vector::Ones(ineq.m());

  const long m_total = static_cast<long>(n) + ineq.m();
  return SdpProblem::make(std::move(f), ProxOracle::zero(), SymLinearMap::empty(n),
                          Vector::Zero(0), std::move(ineq), b_ineq,
                          ManifoldDescriptor::oblique(n), p.value_or(default_rank(m_total, n)));
}

std::vector<CutPlane> most_violated_planes(const Matrix& x, int m) {
  const int n = static_cast<int>(x.rows());
  struct Scored {
    double violation;
    CutPlane plane;
  };
  std::vector<Scored> found;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (int k = j + 1; k < n; ++k) {
        const double xij = x(i, j), xik = x(i, k), xjk = x(j, k);
        for (int pat = 0; pat < 4; ++pat) {
          const auto s = cut_pattern_signs(pat);
          const double sum = s[0] * xij + s[1] * xik + s[2] * xjk;
          const double viol = -1.0 - sum;
          if (viol > 0.0) found.push_back({viol, {i, j, k, pat}});
        }
      }
  std::sort(found.begin(), found.end(), [](const Scored& a, const Scored& b) {
    if (a.violation != b.violation) return a.violation > b.violation;
    const auto ka = std::tuple(a.plane.i, a.plane.j, a.plane.k, a.plane.pattern);
    const auto kb = std::tuple(b.plane.i, b.plane.j, b.plane.k, b.plane.pattern);
    return ka < kb;
  });
  if (static_cast<int>(found.size()) > m) found.resize(m);
  std::vector<CutPlane> out;
  out.reserve(found.size());
  for (const auto& f : found) out.push_back(f.plane);
  return out;
}

std::vector<CutPlane> generate_cutting_planes(const Graph& g, EntropyKind kind, double lambda_ent,
                                              int m, const SolveOptions& presolve_opts) {
  if (m <= 0) return {};
  const SdpProblem presolve = build_maxcut(g, {}, {kind, lambda_ent});
  const Solution sol = solve(presolve, presolve_opts);
  const Matrix x = sol.r.transpose() * sol.r;
  return most_violated_planes(x, m);
}

SdpProblem build_theta(const Graph& g, std::optional<int> p) {
  const int n = g.n;
  std::vector<std::pair<int, int>> idx;
  idx.reserve(g.edges.size());
  for (const auto& e : g.edges) idx.emplace_back(e.i, e.j);
  SymLinearMap eq = SymLinearMap::entries(n, std::move(idx));
  const Vector b = Vector::Zero(eq.m());
  // f(X) = <-ee^T, X> = -||Re||^2, kept rank-one.
  SmoothOracle f = SmoothOracle::linear_rank_one(n, -1.0, Vector::Ones(n));
  const long m_total = static_cast<long>(eq.m()) + 1;
  return SdpProblem::make(std::move(f), ProxOracle::zero(), std::move(eq), b,
                          SymLinearMap::empty(n), Vector::Zero(0),
                          ManifoldDescriptor::frob_sphere(n),
                          p.value_or(default_rank(m_total, n)));
}

SdpProblem build_rcp(const SymMatrix& affinity, int k, std::optional<int> p) {
  const int n = affinity.n();
  if (k < 1) throw std::invalid_argument("build_rcp: need at least one cluster");
  if (k > n) throw std::invalid_argument("build_rcp: more clusters than points");
  // Row sums Xe = e via the matrices 0.5 (e_i e^T + e e_i^T); tr X = K lives
  // in B as the scaled sphere ||R||_F^2 = K.
  std::vector<SymMatrix> rows;
  rows.reserve(n);
  for (int i = 0; i < n; ++i) {
    std::vector<SymMatrix::Entry> trips;
    trips.reserve(n);
    for (int j = 0; j < n; ++j) {
      if (j == i)
        trips.push_back({i, i, 1.0});
      else
        trips.push_back({std::max(i, j), std::min(i, j), 0.5});
    }
    rows.push_back(SymMatrix::from_triplets(n, std::move(trips)));
  }
  SymMatrix c = affinity;
  c *= -1.0;
  const long m_total = static_cast<long>(n) + 1;
  return SdpProblem::make(SmoothOracle::linear(std::move(c)), ProxOracle::indicator_nonneg(),
                          SymLinearMap::general(n, std::move(rows)), Vector::Ones(n),
                          SymLinearMap::empty(n), Vector::Zero(0),
                          ManifoldDescriptor::frob_sphere(n, static_cast<double>(k)),
                          p.value_or(default_rank(m_total, n)));
}

SdpProblem build_ncm(const SymMatrix& g_data, const SymMatrix* h_weights,
                     std::optional<double> box_lower, std::optional<int> p) {
  const int n = g_data.n();
  SymMatrix h = h_weights ? *h_weights : SymMatrix::from_dense(Matrix::Ones(n, n));
  if (box_lower && *box_lower > 1.0)
    throw std::invalid_argument("build_ncm: box lower bound above the unit diagonal");
  ProxOracle prox = box_lower ? ProxOracle::indicator_box(*box_lower) : ProxOracle::zero();
  return SdpProblem::make(SmoothOracle::weighted_quad(std::move(h), g_data), std::move(prox),
                          SymLinearMap::empty(n), Vector::Zero(0), SymLinearMap::empty(n),
                          Vector::Zero(0), ManifoldDescriptor::oblique(n),
                          p.value_or(default_rank(n, n)));
}

SdpProblem build_spca(const SymMatrix& l, double lambda, std::optional<int> p) {
  if (lambda < 0.0) throw std::invalid_argument("build_spca: lambda < 0");
  const int n = l.n();
  SymMatrix c = l;
  c *= -1.0;
  return SdpProblem::make(SmoothOracle::linear(std::move(c)), ProxOracle::l1(lambda),
                          SymLinearMap::empty(n), Vector::Zero(0), SymLinearMap::empty(n),
                          Vector::Zero(0), ManifoldDescriptor::frob_sphere(n),
                          p.value_or(default_rank(n, n)));
}

double cut_value(const Graph& g, const std::vector<int>& signs) {
  double v = 0.0;
  for (const auto& e : g.edges)
    if (signs[e.i] != signs[e.j]) v += e.w;
  return v;
}

RoundedCut round_cut(const Graph& g, const FactorMatrix& r, int trials, std::uint64_t seed) {
  if (r.cols() != g.n) throw std::invalid_argument("round_cut: factor/graph size mismatch");
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  RoundedCut best;
  best.value = -std::numeric_limits<double>::infinity();
  std::vector<int> signs(g.n);
  for (int t = 0; t < std::max(1, trials); ++t) {
    Vector dir = Vector::NullaryExpr(r.rows(), [&](Eigen::Index) { return gauss(gen); });
    const Vector proj = r.transpose() * dir;
    for (int i = 0; i < g.n; ++i) signs[i] = proj[i] < 0.0 ? -1 : 1;
    const double v = cut_value(g, signs);
    if (v > best.value) {
      best.value = v;
      best.signs = signs;
    }
  }
  return best;
}

double gap_percent(double best, double cut) {
  if (!(best > 0.0)) throw std::invalid_argument("gap_percent: best must be positive");
  return 100.0 * (best - cut) / best;
}

std::optional<double> gset_best_known(const std::string& instance) {
  static const std::map<std::string, double> table = {
      {"g1", 11624},  {"g2", 11620},  {"g3", 11622},  {"g4", 11646},  {"g5", 11631},
      {"g6", 2178},   {"g7", 2006},   {"g8", 2005},   {"g9", 2054},   {"g10", 2000},
      {"g11", 564},   {"g12", 556},   {"g13", 582},   {"g14", 3064},  {"g15", 3050},
      {"g16", 3052},  {"g17", 3047},  {"g18", 992},   {"g19", 906},   {"g20", 941},
      {"g21", 931},   {"g22", 13359}, {"g23", 13344}, {"g24", 13337}, {"g25", 13340},
      {"g26", 13328}, {"g27", 3341},  {"g28", 3298},  {"g29", 3405},  {"g30", 3413},
      {"g31", 3310},  {"g32", 1410},  {"g33", 1382},  {"g34", 1384},  {"g35", 7687},
      {"g36", 7680},  {"g37", 7691},  {"g38", 7688},  {"g39", 2408},  {"g40", 2400},
      {"g41", 2405},  {"g42", 2481},  {"g43", 6660},  {"g44", 6650},  {"g45", 6654},
      {"g46", 6649},  {"g47", 6657},  {"g48", 6000},  {"g49", 6000},  {"g50", 5880},
      {"g51", 3848},  {"g52", 3851},  {"g53", 3850},  {"g54", 3852}};
  std::string key;
  for (char c : instance) key += static_cast<char>(std::tolower(c));
  if (auto dot = key.find('.'); dot != std::string::npos) key = key.substr(0, dot);
  // Accept zero-padded forms such as g05.
  if (key.size() > 1 && key[0] == 'g') {
    std::string digits = key.substr(1);
    while (digits.size() > 1 && digits[0] == '0') digits = digits.substr(1);
    key = "g" + digits;
  }
  const auto it = table.find(key);
  if (it == table.end()) return std::nullopt;
  return it->second;
}

}  // namespace sdpdal
