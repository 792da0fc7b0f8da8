#include "sdpdal/linmap.hpp"

#include <stdexcept>

namespace sdpdal {

namespace {

// Enumerate BlockIdentity outputs: (block, i, j) with i >= j, row-major.
template <typename F>
void for_each_block_entry(const std::vector<int>& blocks, F&& f) {
  int base = 0;
  for (int d : blocks) {
    for (int i = 0; i < d; ++i)
      for (int j = 0; j <= i; ++j) f(base + i, base + j);
    base += d;
  }
}

}  // namespace

void SymLinearMap::check_n(int n) const {
  if (n != n_) throw std::invalid_argument("SymLinearMap: dimension mismatch");
}

SymLinearMap SymLinearMap::empty(int n) {
  SymLinearMap a;
  a.kind_ = Kind::General;
  a.n_ = n;
  a.m_ = 0;
  return a;
}

SymLinearMap SymLinearMap::diag(int n) {
  SymLinearMap a;
  a.kind_ = Kind::Diag;
  a.n_ = n;
  a.m_ = n;
  return a;
}

SymLinearMap SymLinearMap::trace(int n) {
  SymLinearMap a;
  a.kind_ = Kind::Trace;
  a.n_ = n;
  a.m_ = 1;
  return a;
}

SymLinearMap SymLinearMap::entries(int n, std::vector<std::pair<int, int>> idx) {
  SymLinearMap a;
  a.kind_ = Kind::Entries;
  a.n_ = n;
  a.m_ = static_cast<int>(idx.size());
  for (auto& [i, j] : idx) {
    if (i < 0 || i >= n || j < 0 || j >= n)
      throw std::invalid_argument("SymLinearMap::entries: index out of range");
    if (i < j) std::swap(i, j);
  }
  a.idx_ = std::move(idx);
  return a;
}

SymLinearMap SymLinearMap::general(int n, std::vector<SymMatrix> mats) {
  SymLinearMap a;
  a.kind_ = Kind::General;
  a.n_ = n;
  a.m_ = static_cast<int>(mats.size());
  for (const auto& m : mats)
    if (m.n() != n) throw std::invalid_argument("SymLinearMap::general: dimension mismatch");
  a.mats_ = std::move(mats);
  return a;
}

SymLinearMap SymLinearMap::block_identity(int n, std::vector<int> block_sizes) {
  SymLinearMap a;
  a.kind_ = Kind::BlockIdentity;
  a.n_ = n;
  int total = 0;
  int m = 0;
  for (int d : block_sizes) {
    if (d <= 0) throw std::invalid_argument("SymLinearMap::block_identity: bad block size");
    total += d;
    m += d * (d + 1) / 2;
  }
  if (total != n)
    throw std::invalid_argument("SymLinearMap::block_identity: partition must end at n");
  a.m_ = m;
  a.blocks_ = std::move(block_sizes);
  return a;
}

Vector SymLinearMap::apply(const SymMatrix& x) const {
  check_n(x.n());
  Vector out(m_);
  switch (kind_) {
    case Kind::Diag:
      for (int i = 0; i < n_; ++i) out[i] = x.coeff(i, i);
      break;
    case Kind::Trace:
      out[0] = x.trace();
      break;
    case Kind::Entries:
      for (int k = 0; k < m_; ++k) out[k] = x.coeff(idx_[k].first, idx_[k].second);
      break;
    case Kind::General: {
      const Matrix xd = x.dense();
      for (int k = 0; k < m_; ++k) out[k] = mats_[k].inner_dense(xd);
      break;
    }
    case Kind::BlockIdentity: {
      int k = 0;
      for_each_block_entry(blocks_, [&](int i, int j) { out[k++] = x.coeff(i, j); });
      break;
    }
  }
  return out;
}

Vector SymLinearMap::apply_dense(const Matrix& x) const {
  if (x.rows() != n_ || x.cols() != n_)
    throw std::invalid_argument("SymLinearMap: dimension mismatch");
  Vector out(m_);
  switch (kind_) {
    case Kind::Diag:
      out = x.diagonal();
      break;
    case Kind::Trace:
      out[0] = x.trace();
      break;
    case Kind::Entries:
      for (int k = 0; k < m_; ++k) out[k] = x(idx_[k].first, idx_[k].second);
      break;
    case Kind::General:
      for (int k = 0; k < m_; ++k) out[k] = mats_[k].inner_dense(x);
      break;
    case Kind::BlockIdentity: {
      int k = 0;
      for_each_block_entry(blocks_, [&](int i, int j) { out[k++] = x(i, j); });
      break;
    }
  }
  return out;
}

Vector SymLinearMap::apply_factored(const FactorMatrix& r) const {
  if (r.cols() != n_) throw std::invalid_argument("SymLinearMap: dimension mismatch");
  Vector out(m_);
  switch (kind_) {
    case Kind::Diag:
      for (int i = 0; i < n_; ++i) out[i] = r.col(i).squaredNorm();
      break;
    case Kind::Trace:
      out[0] = r.squaredNorm();
      break;
    case Kind::Entries:
      for (int k = 0; k < m_; ++k) out[k] = r.col(idx_[k].first).dot(r.col(idx_[k].second));
      break;
    case Kind::General:
      for (int k = 0; k < m_; ++k) out[k] = mats_[k].inner_factored(r);
      break;
    case Kind::BlockIdentity: {
      int k = 0;
      for_each_block_entry(blocks_, [&](int i, int j) { out[k++] = r.col(i).dot(r.col(j)); });
      break;
    }
  }
  return out;
}

Vector SymLinearMap::apply_factored_sym(const FactorMatrix& u, const FactorMatrix& v) const {
  if (u.cols() != n_ || v.cols() != n_ || u.rows() != v.rows())
    throw std::invalid_argument("SymLinearMap: dimension mismatch");
  // D = U^T V + V^T U, so D_ij = u_i.v_j + v_i.u_j.
  auto d_ij = [&](int i, int j) { return u.col(i).dot(v.col(j)) + v.col(i).dot(u.col(j)); };
  Vector out(m_);
  switch (kind_) {
    case Kind::Diag:
      for (int i = 0; i < n_; ++i) out[i] = 2.0 * u.col(i).dot(v.col(i));
      break;
    case Kind::Trace: {
      out[0] = 2.0 * (u.array() * v.array()).sum();
      break;
    }
    case Kind::Entries:
      for (int k = 0; k < m_; ++k) out[k] = d_ij(idx_[k].first, idx_[k].second);
      break;
    case Kind::General:
      for (int k = 0; k < m_; ++k) {
        double s = 0.0;
        for (const auto& e : mats_[k].entries())
          s += (e.i == e.j ? 1.0 : 2.0) * e.v * d_ij(e.i, e.j);
        out[k] = s;
      }
      break;
    case Kind::BlockIdentity: {
      int k = 0;
      for_each_block_entry(blocks_, [&](int i, int j) { out[k++] = d_ij(i, j); });
      break;
    }
  }
  return out;
}

SymMatrix SymLinearMap::adjoint(const Vector& y) const {
  if (y.size() != m_) throw std::invalid_argument("SymLinearMap::adjoint: length mismatch");
  std::vector<SymMatrix::Entry> trips;
  switch (kind_) {
    case Kind::Diag:
      for (int i = 0; i < n_; ++i)
        if (y[i] != 0.0) trips.push_back({i, i, y[i]});
      return SymMatrix::from_triplets(n_, std::move(trips));
    case Kind::Trace:
      for (int i = 0; i < n_; ++i)
        if (y[0] != 0.0) trips.push_back({i, i, y[0]});
      return SymMatrix::from_triplets(n_, std::move(trips));
    case Kind::Entries:
      for (int k = 0; k < m_; ++k) {
        auto [i, j] = idx_[k];
        if (y[k] != 0.0) trips.push_back({i, j, i == j ? y[k] : 0.5 * y[k]});
      }
      return SymMatrix::from_triplets(n_, std::move(trips));
    case Kind::General: {
      bool any_dense = false;
      for (const auto& a : mats_) any_dense |= a.is_dense();
      if (any_dense) {
        Matrix acc = Matrix::Zero(n_, n_);
        for (int k = 0; k < m_; ++k)
          if (y[k] != 0.0) mats_[k].add_to_dense(acc, y[k]);
        return SymMatrix::from_dense(acc);
      }
      for (int k = 0; k < m_; ++k) {
        if (y[k] == 0.0) continue;
        for (const auto& e : mats_[k].entries()) trips.push_back({e.i, e.j, y[k] * e.v});
      }
      return SymMatrix::from_triplets(n_, std::move(trips));
    }
    case Kind::BlockIdentity: {
      int k = 0;
      for_each_block_entry(blocks_, [&](int i, int j) {
        if (y[k] != 0.0) trips.push_back({i, j, i == j ? y[k] : 0.5 * y[k]});
        ++k;
      });
      return SymMatrix::from_triplets(n_, std::move(trips));
    }
  }
  return SymMatrix::zero(n_);
}

FactorMatrix SymLinearMap::adjoint_times_factor(const Vector& y, const FactorMatrix& m) const {
  if (y.size() != m_) throw std::invalid_argument("SymLinearMap: length mismatch");
  if (m.cols() != n_) throw std::invalid_argument("SymLinearMap: dimension mismatch");
  FactorMatrix out = FactorMatrix::Zero(m.rows(), n_);
  switch (kind_) {
    case Kind::Diag:
      for (int i = 0; i < n_; ++i) out.col(i) = y[i] * m.col(i);
      break;
    case Kind::Trace:
      out = y[0] * m;
      break;
    case Kind::Entries:
      for (int k = 0; k < m_; ++k) {
        auto [i, j] = idx_[k];
        if (i == j) {
          out.col(i) += y[k] * m.col(i);
        } else {
          out.col(j) += 0.5 * y[k] * m.col(i);
          out.col(i) += 0.5 * y[k] * m.col(j);
        }
      }
      break;
    case Kind::General:
      for (int k = 0; k < m_; ++k) {
        if (y[k] == 0.0) continue;
        if (mats_[k].is_dense()) {
          out += y[k] * mats_[k].left_product(m);
          continue;
        }
        for (const auto& e : mats_[k].entries()) {
          const double w = y[k] * e.v;
          if (e.i == e.j) {
            out.col(e.i) += w * m.col(e.i);
          } else {
            out.col(e.j) += w * m.col(e.i);
            out.col(e.i) += w * m.col(e.j);
          }
        }
      }
      break;
    case Kind::BlockIdentity: {
      int k = 0;
      for_each_block_entry(blocks_, [&](int i, int j) {
        if (i == j) {
          out.col(i) += y[k] * m.col(i);
        } else {
          out.col(j) += 0.5 * y[k] * m.col(i);
          out.col(i) += 0.5 * y[k] * m.col(j);
        }
        ++k;
      });
      break;
    }
  }
  return out;
}

Vector SymLinearMap::adjoint_matvec(const Vector& y, const Vector& v) const {
  // Single-row factor view of v.
  FactorMatrix m = v.transpose();
  return adjoint_times_factor(y, m).transpose();
}

void SymLinearMap::adjoint_add_dense(const Vector& y, Matrix& acc, double scale) const {
  if (y.size() != m_) throw std::invalid_argument("SymLinearMap: length mismatch");
  if (acc.rows() != n_ || acc.cols() != n_)
    throw std::invalid_argument("SymLinearMap: dimension mismatch");
  switch (kind_) {
    case Kind::Diag:
      acc.diagonal() += scale * y;
      break;
    case Kind::Trace:
      acc.diagonal().array() += scale * y[0];
      break;
    case Kind::Entries:
      for (int k = 0; k < m_; ++k) {
        auto [i, j] = idx_[k];
        if (i == j) {
          acc(i, i) += scale * y[k];
        } else {
          acc(i, j) += 0.5 * scale * y[k];
          acc(j, i) += 0.5 * scale * y[k];
        }
      }
      break;
    case Kind::General:
      for (int k = 0; k < m_; ++k)
        if (y[k] != 0.0) mats_[k].add_to_dense(acc, scale * y[k]);
      break;
    case Kind::BlockIdentity: {
      int k = 0;
      for_each_block_entry(blocks_, [&](int i, int j) {
        if (i == j) {
          acc(i, i) += scale * y[k];
        } else {
          acc(i, j) += 0.5 * scale * y[k];
          acc(j, i) += 0.5 * scale * y[k];
        }
        ++k;
      });
      break;
    }
  }
}

long SymLinearMap::total_nnz() const {
  switch (kind_) {
    case Kind::Diag:
    case Kind::Trace:
      return n_;
    case Kind::Entries:
      return static_cast<long>(idx_.size());
    case Kind::BlockIdentity:
      return m_;
    case Kind::General: {
      long s = 0;
      for (const auto& a : mats_) s += a.nnz();
      return s;
    }
  }
  return 0;
}

}  // namespace sdpdal
