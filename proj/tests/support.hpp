#pragma once

#include <random>

#include "sdpdal/apps.hpp"

namespace sdpdal::testsupport {

inline std::mt19937_64 rng(std::uint64_t seed) { return std::mt19937_64(seed); }

inline Matrix gaussian_matrix(int rows, int cols, std::uint64_t seed) {
  auto gen = rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix m(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) m(i, j) = g(gen);
  return m;
}

inline Matrix random_symmetric(int n, std::uint64_t seed) {
  const Matrix a = gaussian_matrix(n, n, seed);
  return Matrix(0.5 * (a + a.transpose().eval()));
}

inline SymMatrix random_sparse_sym(int n, int nnz, std::uint64_t seed) {
  auto gen = rng(seed);
  std::uniform_int_distribution<int> idx(0, n - 1);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<SymMatrix::Entry> trips;
  for (int k = 0; k < nnz; ++k) trips.push_back({idx(gen), idx(gen), g(gen)});
  return SymMatrix::from_triplets(n, std::move(trips));
}

inline Graph gnp_graph(int n, double p_edge, std::uint64_t seed) {
  auto gen = rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Graph::Edge> edges;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (u(gen) < p_edge) edges.push_back({i, j, 1.0});
  if (edges.empty()) edges.push_back({0, 1, 1.0});
  return Graph::make(n, std::move(edges));
}

inline Graph complete_graph(int n) {
  std::vector<Graph::Edge> edges;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) edges.push_back({i, j, 1.0});
  return Graph::make(n, std::move(edges));
}

inline Graph cycle_graph(int n) {
  std::vector<Graph::Edge> edges;
  for (int i = 0; i < n; ++i) edges.push_back({i, (i + 1) % n, 1.0});
  return Graph::make(n, std::move(edges));
}

inline Graph empty_graph(int n) { return Graph::make(n, {}); }

/// Correlation-like data whose nearest correlation matrix stays low rank:
/// Gram matrix of r-dimensional unit vectors plus a small low-rank
/// perturbation.
inline Matrix lowrank_corr_data(int n, int r, double alpha, std::uint64_t seed) {
  auto gen = rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix b(r, n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < r; ++i) b(i, j) = g(gen);
    b.col(j).normalize();
  }
  Matrix ghat = b.transpose() * b;
  Matrix p1(2, n), p2(2, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < 2; ++i) {
      p1(i, j) = g(gen);
      p2(i, j) = g(gen);
    }
  const Matrix e = p1.transpose() * p2;
  return Matrix(ghat + alpha * 0.5 * (e + e.transpose().eval()));
}

/// Two noisy affinity blocks, the clustering structure RCP recovers.
inline Matrix block_affinity(int n, std::uint64_t seed) {
  auto gen = rng(seed);
  std::uniform_real_distribution<double> u(0.0, 0.2);
  Matrix w(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const bool same = (i < n / 2) == (j < n / 2);
      w(i, j) = (same ? 1.0 : 0.1) + u(gen);
    }
  return Matrix(0.5 * (w + w.transpose().eval()));
}

/// The paper's random sparse-PCA family: L = u u^T/||u||^2 + 2 V V^T with
/// u = (1, 1/2, ..., 1/n) and V uniform in [0, 1].
inline Matrix spca_matrix(int n, std::uint64_t seed) {
  auto gen = rng(seed);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  Vector u(n);
  for (int i = 0; i < n; ++i) u[i] = 1.0 / (i + 1);
  Matrix v(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) v(i, j) = u01(gen);
  return Matrix(u * u.transpose() / u.squaredNorm() + 2.0 * v * v.transpose());
}

inline FactorMatrix random_tangent(const ManifoldDescriptor& desc, const FactorMatrix& r,
                                   std::uint64_t seed) {
  FactorMatrix v = gaussian_matrix(static_cast<int>(r.rows()), static_cast<int>(r.cols()), seed);
  return project_tangent(desc, r, v);
}

}  // namespace sdpdal::testsupport
