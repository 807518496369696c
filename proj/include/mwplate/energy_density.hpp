#pragma once

#include "mwplate/linalg.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace mwplate {

using Mat9 = Eigen::Matrix<double, 9, 9>;
using Vec9 = Eigen::Matrix<double, 9, 1>;

/// Row-major vectorization, index 3*i + k holds A(i,k).
inline Vec9 vec9(const Mat3& A) {
  Vec9 a;
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k) a(3 * i + k) = A(i, k);
  return a;
}

inline Mat3 unvec9(const Vec9& a) {
  Mat3 A;
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k) A(i, k) = a(3 * i + k);
  return A;
}

enum class DensityKind {
  canonical_dist,  ///< W = min_j f_q(dist(F, SO(3)U_j))
  green_lagrange,  ///< W = min_j 1/4 |U_j^-1 F^T F U_j^-1 - Id|^2
};

std::string to_string(DensityKind kind);
DensityKind density_kind_from_string(const std::string& name);

/// f_q(t) = min(t^2, t^q).
double growth_function(double t, double q);

/// Wells plus density choice and the exponents of the penalized energy.
/// Immutable after construction.
class MultiWellModel {
 public:
  MultiWellModel(std::vector<Well> wells, DensityKind kind, double q = 2.0, double p = 4.0,
                 double well_scale = 1.0);

  const std::vector<Well>& wells() const { return wells_; }
  const Well& well(std::size_t j) const { return wells_.at(j); }
  std::size_t size() const { return wells_.size(); }
  DensityKind kind() const { return kind_; }
  double q() const { return q_; }
  double p() const { return p_; }
  double well_scale() const { return well_scale_; }

  /// Contribution of well j alone (the density is the minimum over wells).
  double well_density(std::size_t j, const Mat3& F) const;
  double density(const Mat3& F) const;
  /// min_j dist(F, SO(3)U_j)
  double distance_to_wells(const Mat3& F) const;

  /// Pairs (i, j), i < j, with U_j^-1 U_i in SO(3) up to 1e-8 in singular values.
  std::vector<std::pair<std::size_t, std::size_t>> overlapping_wells() const;

 private:
  std::vector<Well> wells_;
  DensityKind kind_;
  double q_;
  double p_;
  double well_scale_;
};

inline double evaluate_density(const MultiWellModel& model, const Mat3& F) {
  return model.density(F);
}

/// Quadratic form on 3x3 matrices, Q(A) = vec9(A)^T H vec9(A).
class QuadraticForm3 {
 public:
  QuadraticForm3() = default;
  QuadraticForm3(const Mat9& coefficients, std::size_t well);

  double operator()(const Mat3& A) const { return vec9(A).dot(H_ * vec9(A)); }
  double bilinear(const Mat3& A, const Mat3& B) const { return vec9(A).dot(H_ * vec9(B)); }
  const Mat9& coefficients() const { return H_; }
  std::size_t well() const { return well_; }

 private:
  Mat9 H_ = Mat9::Zero();
  std::size_t well_ = 0;
};

/// Matrix of the linear map A -> sym(A U^-1) on vectorized 3x3 matrices.
Mat9 symmetric_strain_map(const Well& well);

/// Q(A) = 2 |sym(A U^-1)|^2, the Hessian of the Green-Lagrange density at U.
QuadraticForm3 green_lagrange_form(const Well& well, std::size_t index = 0);

/// Anisotropic form Q(A) = e^T C e with e = sym(A U^-1) in orthonormal Voigt
/// coordinates and C a symmetric positive definite 6x6 matrix.
QuadraticForm3 anisotropic_form(const Well& well, const Eigen::Matrix<double, 6, 6>& C,
                                std::size_t index = 0);

/// Hessian by central differences with one Richardson halving.
QuadraticForm3 finite_difference_hessian(const MultiWellModel& model, std::size_t j,
                                         double step = 1e-4);

/// Q_j = D^2 W(U_j): closed form for green_lagrange, finite differences otherwise.
QuadraticForm3 hessian_Q(const MultiWellModel& model, std::size_t j);

/// Orthonormal basis of symmetric 3x3 matrices (Voigt order 11,22,33,23,13,12).
std::array<Mat3, 6> symmetric_basis();

/// Smallest eigenvalue of S -> Q(U^-1 S) on unit symmetric S.
double coercivity_constant(const QuadraticForm3& Q, const Well& well);

struct WellReport {
  double density_at_well = 0.0;
  double symmetry_residual = 0.0;
  double coercivity = 0.0;
  bool zero_ok = false;
  bool symmetry_ok = false;
  bool coercivity_ok = false;
};

struct HypothesisReport {
  std::vector<WellReport> wells;
  double frame_indifference_residual = 0.0;
  double lower_bound_constant = 0.0;  ///< empirical best C in W >= C f_q(dist)
  bool frame_indifference_ok = false;
  bool lower_bound_ok = false;
  bool disjoint_ok = false;
  bool penalty_exponent_ok = false;  ///< p > 6/5 when q < 2

  bool all_ok() const;
};

HypothesisReport check_hypotheses(const MultiWellModel& model, std::uint64_t seed = 42);

}  // namespace mwplate
