#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sdpdal/alm.hpp"
#include "sdpdal/model.hpp"

namespace sdpdal {

/// Weighted undirected graph, 0-based internally (parsers convert from the
/// 1-based file ids). No self-loops, edges deduplicated.
struct Graph {
  struct Edge {
    int i, j;
    double w;
  };
  int n = 0;
  std::vector<Edge> edges;

  static Graph make(int n, std::vector<Edge> edges);
  double total_weight() const;
};

/// One triangle inequality on (i, j, k), i < j < k. The pattern signs apply
/// to (X_ij, X_ik, X_jk) in the >= -1 orientation of the source constraints.
struct CutPlane {
  int i, j, k;
  int pattern;  // 0: +++, 1: +--, 2: -+-, 3: --+
};

inline std::array<int, 3> cut_pattern_signs(int pattern) {
  switch (pattern) {
    case 0: return {+1, +1, +1};
    case 1: return {+1, -1, -1};
    case 2: return {-1, +1, -1};
    default: return {-1, -1, +1};
  }
}

struct EntropySpec {
  EntropyKind kind = EntropyKind::None;
  double lambda = 0.0;  // <= 0 picks the scale-relative default 0.1 ||C||_inf
};

SdpProblem build_maxcut(const Graph& g, const std::vector<CutPlane>& cuts = {},
                        const EntropySpec& entropy = {}, std::optional<int> p = std::nullopt);

/// Entropy presolve, then the <= m most violated triangle constraints under
/// the presolve solution, sorted by violation (ties lexicographic).
std::vector<CutPlane> generate_cutting_planes(const Graph& g, EntropyKind kind, double lambda_ent,
                                              int m, const SolveOptions& presolve_opts = {});
/// Scoring half of the generator, exposed for oracle tests: most violated
/// planes under a given X.
std::vector<CutPlane> most_violated_planes(const Matrix& x, int m);

SdpProblem build_theta(const Graph& g, std::optional<int> p = std::nullopt);

SdpProblem build_rcp(const SymMatrix& affinity, int k, std::optional<int> p = std::nullopt);

SdpProblem build_ncm(const SymMatrix& g_data, const SymMatrix* h_weights = nullptr,
                     std::optional<double> box_lower = std::nullopt,
                     std::optional<int> p = std::nullopt);

SdpProblem build_spca(const SymMatrix& l, double lambda, std::optional<int> p = std::nullopt);

struct RoundedCut {
  double value = 0.0;
  std::vector<int> signs;  // +-1 per vertex
};
/// Best random-hyperplane rounding over `trials` Gaussian draws.
RoundedCut round_cut(const Graph& g, const FactorMatrix& r, int trials, std::uint64_t seed);

double cut_value(const Graph& g, const std::vector<int>& signs);

/// gap% = 100 (best - cut) / best, best > 0.
double gap_percent(double best, double cut);

/// Best-known Gset cut values (static reference for gap% reporting).
std::optional<double> gset_best_known(const std::string& instance);

}  // namespace sdpdal
