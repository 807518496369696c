#pragma once

#include "mwplate/energy_density.hpp"

namespace mwplate {

/// Orthonormal coordinates (D11, D22, sqrt(2) D12) of sym(D); |sym D| = |d|.
inline Vec3 sym2_coordinates(const Mat2& D) {
  return Vec3(D(0, 0), D(1, 1), std::sqrt(2.0) * 0.5 * (D(0, 1) + D(1, 0)));
}

inline Mat2 sym2_from_coordinates(const Vec3& d) {
  const double off = d(2) / std::sqrt(2.0);
  Mat2 D;
  D << d(0), off, off, d(1);
  return D;
}

/// a (x) e3 + e3 (x) a
inline Mat3 transverse_completion(const Vec3& a) {
  Mat3 A = Mat3::Zero();
  A.col(2) += a;
  A.row(2) += a.transpose();
  return A;
}

/// Relaxed plate form Qbar_j(D) = min_a Q_j(U_j^-1 (sym D + a(x)e3 + e3(x)a))
/// and its minimizing completion L_j. The 3x3 optimality system is assembled
/// and factorized once at construction.
class RelaxedForm {
 public:
  RelaxedForm(const QuadraticForm3& form, const Well& well);

  /// L_j(D): the optimal transverse completion vector.
  Vec3 l_operator(const Mat2& D) const;
  double operator()(const Mat2& D) const { return relaxed_q(D); }
  double relaxed_q(const Mat2& D) const;

  /// Full 3x3 strain argument U^-1 (sym D + L(D)(x)e3 + e3(x)L(D)).
  Mat3 optimal_argument(const Mat2& D) const;

  /// Qbar in the coordinates of sym2_coordinates: Qbar(D) = d^T C d.
  const Mat3& coefficients() const { return coefficients_; }
  /// L in the same coordinates: L(D) = M d.
  const Mat3& l_matrix() const { return l_matrix_; }
  /// Gradient of D -> Qbar(D) with respect to the entries of sym D.
  Mat2 gradient(const Mat2& D) const;

  const QuadraticForm3& source() const { return form_; }
  const Well& well() const { return well_; }
  std::size_t index() const { return form_.well(); }

  /// Residuals of the three stationarity conditions at completion a.
  Vec3 stationarity_residual(const Mat2& D, const Vec3& a) const;

 private:
  QuadraticForm3 form_;
  Well well_;
  Mat3 system_;                   // K_ik = B(U^-1 G_i, U^-1 G_k)
  Eigen::LLT<Mat3> factor_;
  Mat3 coefficients_;
  Mat3 l_matrix_;
};

/// Builds the relaxed form of well j of a model from its Hessian.
RelaxedForm relaxed_form(const MultiWellModel& model, std::size_t j);

}  // namespace mwplate
