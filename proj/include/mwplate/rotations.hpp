#pragma once

// Dead-load functional F(RU) = tr(R^T M) on the wells, its maximizer sets and
// the geodesic projection onto them.

#include "mwplate/plate_functionals.hpp"
#include "mwplate/recovery.hpp"

namespace mwplate {

/// P = int f (x) (x1, x2, 0), exact for polynomial loads.
Mat3 load_moments(const LoadField& load);

/// M = P U, so that F(RU) = tr(R^T M).
struct MomentMatrix {
  Mat3 M;
  std::size_t well = 0;

  double evaluate(const Mat3& R) const { return (R.transpose() * M).trace(); }
};

MomentMatrix moment_matrix(const LoadField& load, const Well& well, std::size_t index = 0);

/// int f . A (x', 0) by grid quadrature.
double load_functional(const LoadField& load, const Mat3& A);

/// A maximizer set of R -> F(R U_j), represented by one maximizer R* and the
/// eigenspaces of N, the matrix of w -> F(R* [w]^2 U_j).
struct RotationSet {
  std::size_t well = 0;
  double value = 0.0;
  Mat3 representative = Mat3::Identity();
  Mat3 moment = Mat3::Zero();
  Mat3 N = Mat3::Zero();
  int dimension = 0;
  Eigen::Matrix<double, 3, Eigen::Dynamic> tangent;  ///< orthonormal axial vectors, body frame
  Eigen::Matrix<double, 3, Eigen::Dynamic> normal;

  /// |skw(R*^T M)|: the first-order condition F(R* W U) = 0 for all skew W.
  double first_order_residual() const;
  /// Largest eigenvalue of N (nonpositive at a maximizer).
  double second_order_max() const;
  /// F(R [w]^2 U) at a rotation R of the set.
  double fluctuation(const Mat3& R, const Vec3& w) const;
  /// R* exp([T theta]) for tangent coordinates theta.
  Mat3 point(const Eigen::VectorXd& theta) const;
};

RotationSet rotation_set(const MomentMatrix& moment, double tolerance = 1e-9);
int rotation_set_dimension(const RotationSet& set);

struct WellMaximization {
  std::vector<std::size_t> lambda;  ///< zero-based well indices attaining the maximum
  std::vector<RotationSet> sets;
  double best = 0.0;
};

/// Per-well Procrustes maximization; a well is in Lambda when its value is within
/// 1e-9 |max| of the largest.
WellMaximization maximize_over_wells(const LoadField& load, const std::vector<Well>& wells,
                                     double tolerance = 1e-9);

struct Projection {
  Mat3 P;
  double distance;
  Vec3 generator;  ///< axial vector of log(P^T R)
};

/// Nearest point of the set in the geodesic distance, for R within pi/4 of it.
Projection project_to_set(const Mat3& R, const RotationSet& set, double max_distance = std::numbers::pi / 4);

/// J = E^regime(u, v) - int f . R U^-1 e3 v - F(R [w]^2 U) for admissible (R, w).
double assemble_limit_objective(const PlateState& state, const LoadField& load, const RotationSet& set,
                                const Mat3& R, const Vec3& w, Regime regime, const RelaxedForm& form);

}  // namespace mwplate
