#pragma once

// Small dense kernels on 3x3 matrices: SVD-based polar/Procrustes, skew
// exponential and logarithm, well distances and the twinning test.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace mwplate {

template <typename Scalar> using Matrix3 = Eigen::Matrix<Scalar, 3, 3>;
template <typename Scalar> using Vector3 = Eigen::Matrix<Scalar, 3, 1>;

using Mat3 = Matrix3<double>;
using Vec3 = Vector3<double>;
using Mat2 = Eigen::Matrix2d;
using Vec2 = Eigen::Vector2d;
using Mat32 = Eigen::Matrix<double, 3, 2>;

/// Skew matrix [w]_x, so that [w]_x v = w x v.
template <typename Derived>
Matrix3<typename Derived::Scalar> skew(const Eigen::MatrixBase<Derived>& w) {
  using S = typename Derived::Scalar;
  Matrix3<S> W;
  W << S(0), -w(2), w(1), w(2), S(0), -w(0), -w(1), w(0), S(0);
  return W;
}

/// Axial vector of the skew part of W.
template <typename Derived>
Vector3<typename Derived::Scalar> axial(const Eigen::MatrixBase<Derived>& W) {
  using S = typename Derived::Scalar;
  return Vector3<S>(W(2, 1) - W(1, 2), W(0, 2) - W(2, 0), W(1, 0) - W(0, 1)) / S(2);
}

template <typename Derived>
Matrix3<typename Derived::Scalar> sym(const Eigen::MatrixBase<Derived>& A) {
  return (A + A.transpose()) / typename Derived::Scalar(2);
}

template <typename Derived>
Matrix3<typename Derived::Scalar> skw(const Eigen::MatrixBase<Derived>& A) {
  return (A - A.transpose()) / typename Derived::Scalar(2);
}

/// Embeds a 2x2 block into the upper-left corner of a 3x3 zero matrix.
template <typename Scalar>
Matrix3<Scalar> embed(const Eigen::Matrix<Scalar, 2, 2>& D) {
  Matrix3<Scalar> A = Matrix3<Scalar>::Zero();
  A.template topLeftCorner<2, 2>() = D;
  return A;
}

/// Axial-vector representation of a skew generator W = [w]_x.
/// |W|^2 = 2|w|^2 in the Frobenius norm.
template <typename Scalar> struct Skew3 {
  Vector3<Scalar> w = Vector3<Scalar>::Zero();

  Skew3() = default;
  explicit Skew3(const Vector3<Scalar>& axis) : w(axis) {}

  Matrix3<Scalar> matrix() const { return skew(w); }
  Scalar frobenius_norm() const { return std::sqrt(Scalar(2)) * w.norm(); }
};

template <typename Scalar> struct ProcrustesResult {
  Scalar value;
  Matrix3<Scalar> rotation;
};

/// max over R in SO(3) of trace(R^T M), with the maximizing rotation.
/// Ties between singular values are resolved by the decomposition order.
template <typename Scalar>
ProcrustesResult<Scalar> procrustes_max(const Matrix3<Scalar>& M) {
  Eigen::JacobiSVD<Matrix3<Scalar>> svd(M, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Matrix3<Scalar>& U = svd.matrixU();
  const Matrix3<Scalar>& V = svd.matrixV();
  const Scalar sign = (U * V.transpose()).determinant() < Scalar(0) ? Scalar(-1) : Scalar(1);
  Vector3<Scalar> d(Scalar(1), Scalar(1), sign);
  const Vector3<Scalar>& s = svd.singularValues();
  return {s(0) + s(1) + sign * s(2), U * d.asDiagonal() * V.transpose()};
}

/// Rotation factor R of the polar decomposition F = R A, A symmetric positive
/// definite. Requires det F > 0.
template <typename Scalar> Matrix3<Scalar> polar_rotation(const Matrix3<Scalar>& F) {
  const Scalar det = F.determinant();
  if (!(det > Scalar(0))) {
    throw std::domain_error("polar_rotation: det F = " + std::to_string(double(det)) +
                            " is not positive");
  }
  Eigen::JacobiSVD<Matrix3<Scalar>> svd(F, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().transpose();
}

/// Rodrigues formula for exp([w]_x).
template <typename Scalar> Matrix3<Scalar> exp_skew(const Vector3<Scalar>& w) {
  const Scalar theta2 = w.squaredNorm();
  const Scalar theta = std::sqrt(theta2);
  Scalar a, b;
  if (theta < Scalar(1e-4)) {
    // Taylor expansions of sin(t)/t and (1-cos t)/t^2, exact to roundoff here.
    a = Scalar(1) - theta2 / Scalar(6) + theta2 * theta2 / Scalar(120);
    b = Scalar(0.5) - theta2 / Scalar(24) + theta2 * theta2 / Scalar(720);
  } else {
    a = std::sin(theta) / theta;
    b = (Scalar(1) - std::cos(theta)) / theta2;
  }
  const Matrix3<Scalar> W = skew(w);
  return Matrix3<Scalar>::Identity() + a * W + b * W * W;
}

template <typename Scalar> Matrix3<Scalar> exp_skew(const Skew3<Scalar>& w) {
  return exp_skew(w.w);
}

/// Axial vector w with exp([w]_x) = R and |w| <= pi.
template <typename Scalar> Vector3<Scalar> log_rotation(const Matrix3<Scalar>& R) {
  const Scalar c = std::clamp((R.trace() - Scalar(1)) / Scalar(2), Scalar(-1), Scalar(1));
  const Vector3<Scalar> s = axial(R);  // sin(theta) * axis
  const Scalar sn = s.norm();
  const Scalar theta = std::atan2(sn, c);
  if (theta < Scalar(1e-6)) {
    return s * (Scalar(1) + theta * theta / Scalar(6));
  }
  if (std::numbers::pi_v<Scalar> - theta > Scalar(1e-4)) {
    return s * (theta / sn);
  }
  // Near pi: R + I ~ 2 n n^T; take the best-conditioned column, then fix the
  // sign from the small skew part.
  const Matrix3<Scalar> B = (R + Matrix3<Scalar>::Identity()) / Scalar(2);
  Eigen::Index k;
  B.diagonal().maxCoeff(&k);
  Vector3<Scalar> n = B.col(k) / std::sqrt(std::max(B(k, k), Scalar(1e-300)));
  n.normalize();
  if (n.dot(s) < Scalar(0)) n = -n;
  return theta * n;
}

template <typename Scalar> Scalar rotation_angle(const Matrix3<Scalar>& R) {
  return log_rotation(R).norm();
}

/// Symmetric positive-definite matrix U whose orbit SO(3)U is an energy well.
class Well {
 public:
  static constexpr double symmetry_tolerance = 1e-12;

  explicit Well(const Mat3& U) : U_(U) {
    if (!U.allFinite()) throw std::invalid_argument("Well: non-finite entries");
    const double asym = (U - U.transpose()).cwiseAbs().maxCoeff();
    if (asym > symmetry_tolerance * std::max(1.0, U.cwiseAbs().maxCoeff())) {
      throw std::invalid_argument("Well: matrix is not symmetric (max |U - U^T| = " +
                                  std::to_string(asym) + ")");
    }
    U_ = sym(U);
    Eigen::SelfAdjointEigenSolver<Mat3> eig(U_);
    if (eig.eigenvalues().minCoeff() <= 0.0) {
      throw std::invalid_argument("Well: matrix is not positive definite");
    }
    inverse_ = U_.inverse();
  }

  const Mat3& matrix() const { return U_; }
  const Mat3& inverse() const { return inverse_; }

  /// U^{-1} e3, the direction carrying the out-of-plane displacement.
  Vec3 normal_direction() const { return inverse_.col(2); }

  /// (U^2)', the flat metric of the well's isometric immersions.
  Mat2 planar_metric() const { return (U_ * U_).topLeftCorner<2, 2>(); }

 private:
  Mat3 U_;
  Mat3 inverse_;
};

/// dist(F, SO(3)U), measured as |F - R*U| with R* the Procrustes optimum of F U^T.
template <typename Scalar>
Scalar dist_to_well(const Matrix3<Scalar>& F, const Matrix3<Scalar>& U) {
  const auto best = procrustes_max<Scalar>(F * U.transpose());
  return (F - best.rotation * U).norm();
}

inline double dist_to_well(const Mat3& F, const Well& well) {
  return dist_to_well<double>(F, well.matrix());
}

struct RankOneConnection {
  bool connected;
  double middle_eigenvalue;
};

/// Middle-eigenvalue twinning test on C = U1^{-1} U2^2 U1^{-1}.
inline RankOneConnection rank_one_connected(const Well& first, const Well& second,
                                            double tolerance = 1e-9) {
  const Mat3 C = first.inverse() * second.matrix() * second.matrix() * first.inverse();
  Eigen::SelfAdjointEigenSolver<Mat3> eig(sym(C), Eigen::EigenvaluesOnly);
  const double middle = eig.eigenvalues()(1);
  return {std::abs(middle - 1.0) < tolerance, middle};
}

}  // namespace mwplate
