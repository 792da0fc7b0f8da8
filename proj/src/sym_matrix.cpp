#include "sdpdal/sym_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sdpdal {

SymMatrix SymMatrix::zero(int n) {
  SymMatrix a;
  a.n_ = n;
  return a;
}

SymMatrix SymMatrix::identity(int n) {
  SymMatrix a;
  a.n_ = n;
  a.coo_.reserve(n);
  for (int i = 0; i < n; ++i) a.coo_.push_back({i, i, 1.0});
  return a;
}

SymMatrix SymMatrix::from_dense(const Matrix& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("SymMatrix: not square");
  const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-10 * (1.0 + m.cwiseAbs().maxCoeff()))
    throw std::invalid_argument("SymMatrix: input not symmetric");
  if (!m.allFinite()) throw std::invalid_argument("SymMatrix: non-finite entries");
  SymMatrix a;
  a.n_ = static_cast<int>(m.rows());
  a.dense_ = true;
  a.d_ = 0.5 * (m + m.transpose());
  return a;
}

SymMatrix SymMatrix::from_triplets(int n, std::vector<Entry> entries) {
  for (auto& e : entries) {
    if (e.i < 0 || e.i >= n || e.j < 0 || e.j >= n)
      throw std::invalid_argument("SymMatrix: index out of range");
    if (!std::isfinite(e.v)) throw std::invalid_argument("SymMatrix: non-finite entry");
    if (e.i < e.j) std::swap(e.i, e.j);
  }
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    return a.i != b.i ? a.i < b.i : a.j < b.j;
  });
  std::vector<Entry> merged;
  merged.reserve(entries.size());
  for (const auto& e : entries) {
    if (!merged.empty() && merged.back().i == e.i && merged.back().j == e.j)
      merged.back().v += e.v;
    else
      merged.push_back(e);
  }
  SymMatrix a;
  a.n_ = n;
  a.coo_ = std::move(merged);
  return a;
}

double SymMatrix::coeff(int i, int j) const {
  if (dense_) return d_(i, j);
  if (i < j) std::swap(i, j);
  for (const auto& e : coo_)
    if (e.i == i && e.j == j) return e.v;
  return 0.0;
}

double SymMatrix::trace() const {
  if (dense_) return d_.trace();
  double t = 0.0;
  for (const auto& e : coo_)
    if (e.i == e.j) t += e.v;
  return t;
}

double SymMatrix::frob_norm() const {
  if (dense_) return d_.norm();
  double s = 0.0;
  for (const auto& e : coo_) s += (e.i == e.j ? 1.0 : 2.0) * e.v * e.v;
  return std::sqrt(s);
}

double SymMatrix::max_abs() const {
  if (dense_) return n_ == 0 ? 0.0 : d_.cwiseAbs().maxCoeff();
  double s = 0.0;
  for (const auto& e : coo_) s = std::max(s, std::abs(e.v));
  return s;
}

Matrix SymMatrix::dense() const {
  if (dense_) return d_;
  Matrix m = Matrix::Zero(n_, n_);
  for (const auto& e : coo_) {
    m(e.i, e.j) += e.v;
    if (e.i != e.j) m(e.j, e.i) += e.v;
  }
  return m;
}

Vector SymMatrix::matvec(const Vector& v) const {
  if (v.size() != n_) throw std::invalid_argument("SymMatrix::matvec: size mismatch");
  if (dense_) return d_ * v;
  Vector out = Vector::Zero(n_);
  for (const auto& e : coo_) {
    out[e.i] += e.v * v[e.j];
    if (e.i != e.j) out[e.j] += e.v * v[e.i];
  }
  return out;
}

Matrix SymMatrix::left_product(const Matrix& m) const {
  if (m.cols() != n_) throw std::invalid_argument("SymMatrix::left_product: size mismatch");
  if (dense_) return m * d_;
  Matrix out = Matrix::Zero(m.rows(), n_);
  for (const auto& e : coo_) {
    out.col(e.j) += e.v * m.col(e.i);
    if (e.i != e.j) out.col(e.i) += e.v * m.col(e.j);
  }
  return out;
}

double SymMatrix::inner_dense(const Matrix& x) const {
  if (x.rows() != n_ || x.cols() != n_)
    throw std::invalid_argument("SymMatrix::inner_dense: size mismatch");
  if (dense_) return (d_.array() * x.array()).sum();
  double s = 0.0;
  for (const auto& e : coo_) s += (e.i == e.j ? 1.0 : 2.0) * e.v * x(e.i, e.j);
  return s;
}

double SymMatrix::inner_factored(const Matrix& r) const {
  if (r.cols() != n_) throw std::invalid_argument("SymMatrix::inner_factored: size mismatch");
  if (dense_) {
    // <A, R^T R> = <R A, R>
    return ((r * d_).array() * r.array()).sum();
  }
  double s = 0.0;
  for (const auto& e : coo_) {
    const double g = r.col(e.i).dot(r.col(e.j));
    s += (e.i == e.j ? 1.0 : 2.0) * e.v * g;
  }
  return s;
}

void SymMatrix::add_to_dense(Matrix& acc, double scale) const {
  if (acc.rows() != n_ || acc.cols() != n_)
    throw std::invalid_argument("SymMatrix::add_to_dense: size mismatch");
  if (dense_) {
    acc += scale * d_;
    return;
  }
  for (const auto& e : coo_) {
    acc(e.i, e.j) += scale * e.v;
    if (e.i != e.j) acc(e.j, e.i) += scale * e.v;
  }
}

SymMatrix& SymMatrix::operator*=(double s) {
  if (dense_)
    d_ *= s;
  else
    for (auto& e : coo_) e.v *= s;
  return *this;
}

}  // namespace sdpdal
