#pragma once

#include "sdpdal/sym_matrix.hpp"

namespace sdpdal {

/// Nonsmooth-term oracle h acting elementwise on S^n: proximal map, the
/// T map T(X) = (X - Z/sigma) - prox_{h/sigma}(X - Z/sigma), Moreau-envelope
/// values, conjugate feasibility and one generalized-Jacobian element of T.
class ProxOracle {
 public:
  enum class Kind { Zero, L1, IndicatorNonneg, IndicatorBox };

  static ProxOracle zero();
  static ProxOracle l1(double lambda);
  static ProxOracle indicator_nonneg();
  static ProxOracle indicator_box(double lower);

  Kind kind() const { return kind_; }
  bool is_zero() const { return kind_ == Kind::Zero; }
  bool is_indicator() const {
    return kind_ == Kind::IndicatorNonneg || kind_ == Kind::IndicatorBox;
  }
  double lambda() const { return lambda_; }
  double lower() const { return lower_; }

  /// prox_{t h}(W), t > 0.
  Matrix prox(double t, const Matrix& w) const;
  /// h(W); +inf never returned for indicators (W assumed feasible by prox).
  double value(const Matrix& w) const;
  /// T(X) given V = X - Z/sigma.
  Matrix t_map_from_shift(double sigma, const Matrix& v) const;
  /// Envelope h(prox_{h/sigma}(V)) + (sigma/2)||T||_F^2 given V = X - Z/sigma.
  double envelope_from_shift(double sigma, const Matrix& v) const;
  /// 0/1 mask of a chosen element of dT(X); entries exactly at a kink keep
  /// mask value 1 (the B-subdifferential limit from the smooth side).
  Matrix jacobian_mask(double sigma, const Matrix& v) const;

  Matrix t_map(double sigma, const Matrix& z, const Matrix& x) const;
  double envelope_value(double sigma, const Matrix& z, const Matrix& x) const;
  Matrix jacobian_element_action(double sigma, const Matrix& z, const Matrix& x,
                                 const Matrix& d) const;

  struct ConjugateValue {
    bool feasible;
    double value;      // finite part (0 except IndicatorBox)
    double violation;  // magnitude of dom(h*) violation, 0 when feasible
  };
  ConjugateValue conjugate_value(const Matrix& y) const;

 private:
  Kind kind_ = Kind::Zero;
  double lambda_ = 0.0;
  double lower_ = 0.0;
};

}  // namespace sdpdal
