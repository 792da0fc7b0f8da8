#include "sdpdal/prox.hpp"

#include <cmath>
#include <stdexcept>

namespace sdpdal {

namespace {
void require_positive(double t, const char* what) {
  if (!(t > 0.0)) throw std::invalid_argument(std::string(what) + ": scale must be positive");
}
}  // namespace

ProxOracle ProxOracle::zero() { return ProxOracle{}; }

ProxOracle ProxOracle::l1(double lambda) {
  if (lambda < 0.0) throw std::invalid_argument("ProxOracle::l1: lambda < 0");
  ProxOracle h;
  h.kind_ = Kind::L1;
  h.lambda_ = lambda;
  return h;
}

ProxOracle ProxOracle::indicator_nonneg() {
  ProxOracle h;
  h.kind_ = Kind::IndicatorNonneg;
  return h;
}

ProxOracle ProxOracle::indicator_box(double lower) {
  ProxOracle h;
  h.kind_ = Kind::IndicatorBox;
  h.lower_ = lower;
  return h;
}

Matrix ProxOracle::prox(double t, const Matrix& w) const {
  require_positive(t, "ProxOracle::prox");
  switch (kind_) {
    case Kind::Zero:
      return w;
    case Kind::L1: {
      const double thr = t * lambda_;
      return w.unaryExpr([thr](double x) {
        return x > thr ? x - thr : (x < -thr ? x + thr : 0.0);
      });
    }
    case Kind::IndicatorNonneg:
      return w.cwiseMax(0.0);
    case Kind::IndicatorBox:
      return w.cwiseMax(lower_);
  }
  return w;
}

double ProxOracle::value(const Matrix& w) const {
  if (kind_ == Kind::L1) return lambda_ * w.cwiseAbs().sum();
  return 0.0;
}

Matrix ProxOracle::t_map_from_shift(double sigma, const Matrix& v) const {
  require_positive(sigma, "ProxOracle::t_map");
  switch (kind_) {
    case Kind::Zero:
      return Matrix::Zero(v.rows(), v.cols());
    case Kind::L1: {
      const double thr = lambda_ / sigma;
      return v.unaryExpr([thr](double x) { return x > thr ? thr : (x < -thr ? -thr : x); });
    }
    case Kind::IndicatorNonneg:
      return v.cwiseMin(0.0);
    case Kind::IndicatorBox:
      return (v.array() - lower_).min(0.0).matrix();
  }
  return v;
}

double ProxOracle::envelope_from_shift(double sigma, const Matrix& v) const {
  require_positive(sigma, "ProxOracle::envelope_value");
  if (kind_ == Kind::Zero) return 0.0;
  const Matrix t = t_map_from_shift(sigma, v);
  double hval = 0.0;
  if (kind_ == Kind::L1) hval = lambda_ * (v - t).cwiseAbs().sum();
  return hval + 0.5 * sigma * t.squaredNorm();
}

Matrix ProxOracle::jacobian_mask(double sigma, const Matrix& v) const {
  require_positive(sigma, "ProxOracle::jacobian_element_action");
  switch (kind_) {
    case Kind::Zero:
      return Matrix::Zero(v.rows(), v.cols());
    case Kind::L1: {
      const double thr = lambda_ / sigma;
      return v.unaryExpr([thr](double x) { return std::abs(x) <= thr ? 1.0 : 0.0; });
    }
    case Kind::IndicatorNonneg:
      return v.unaryExpr([](double x) { return x <= 0.0 ? 1.0 : 0.0; });
    case Kind::IndicatorBox: {
      const double l = lower_;
      return v.unaryExpr([l](double x) { return x <= l ? 1.0 : 0.0; });
    }
  }
  return v;
}

Matrix ProxOracle::t_map(double sigma, const Matrix& z, const Matrix& x) const {
  return t_map_from_shift(sigma, x - z / sigma);
}

double ProxOracle::envelope_value(double sigma, const Matrix& z, const Matrix& x) const {
  return envelope_from_shift(sigma, x - z / sigma);
}

Matrix ProxOracle::jacobian_element_action(double sigma, const Matrix& z, const Matrix& x,
                                           const Matrix& d) const {
  return jacobian_mask(sigma, x - z / sigma).cwiseProduct(d);
}

ProxOracle::ConjugateValue ProxOracle::conjugate_value(const Matrix& y) const {
  ConjugateValue out{true, 0.0, 0.0};
  switch (kind_) {
    case Kind::Zero:
      out.violation = y.size() ? y.cwiseAbs().maxCoeff() : 0.0;
      break;
    case Kind::L1:
      out.violation = std::max(0.0, (y.size() ? y.cwiseAbs().maxCoeff() : 0.0) - lambda_);
      break;
    case Kind::IndicatorNonneg:
      out.violation = std::max(0.0, y.size() ? y.maxCoeff() : 0.0);
      break;
    case Kind::IndicatorBox:
      out.violation = std::max(0.0, y.size() ? y.maxCoeff() : 0.0);
      // Finite part evaluated at the domain projection min(Y, 0) so the
      // reported dual value stays continuous across small violations.
      out.value = lower_ * y.cwiseMin(0.0).sum();
      break;
  }
  out.feasible = out.violation == 0.0;
  return out;
}

}  // namespace sdpdal
