#pragma once

#include "mwplate/functions.hpp"
#include "mwplate/grid.hpp"

#include <optional>
#include <stdexcept>

namespace mwplate {

/// Mid-surface deformation y with its first and second derivatives.
struct Deformation {
  Field<Vec3> y;
  Field<Mat32> grad;
  Field<Vec3> y11, y12, y22;

  /// Derivatives by finite differences of the samples.
  static Deformation from_samples(const Field<Vec3>& y);
  const MidplaneGrid& grid() const { return y.grid(); }
};

/// Raised when grad y violates the flat metric (U^2)' beyond tolerance.
class MetricError : public std::runtime_error {
 public:
  MetricError(const std::string& what, int node, double residual)
      : std::runtime_error(what), node_(node), residual_(residual) {}
  int node() const { return node_; }
  double residual() const { return residual_; }

 private:
  int node_;
  double residual_;
};

struct MetricResidual {
  double max = 0.0;
  int worst_node = -1;
};

/// max over nodes (masked by `interior_margin` when positive) of |grad_y^T grad_y - (U^2)'|.
MetricResidual metric_residual(const Field<Mat32>& grad_y, const Well& well, int interior_margin = 0);

/// nu = |U^-1 e3|^-2 [det(U^-1) d1y x d2y - sum_k (U^-1 e_k . U^-1 e3) d_k y].
Vec3 normal_vector(const Mat32& grad_y, const Well& well);
/// Columns d1 nu, d2 nu from the second derivatives of y.
Mat32 normal_vector_gradient(const Mat32& grad_y, const Vec3& y11, const Vec3& y12, const Vec3& y22,
                             const Well& well);

/// Node-wise nu after checking the metric constraint at every node.
Field<Vec3> normal_vector_nu(const Field<Mat32>& grad_y, const Well& well, double tolerance = 1e-6);
Field<Mat32> normal_vector_nu_gradient(const Deformation& y, const Well& well);

/// A = sqrt((U^2)'), the map to coordinates in which the flat metric is Euclidean.
Mat2 metric_square_root(const Well& well);

/// Developable lift of v(x) = g(n . A x): y = v U^-1 e3 + U (phi, 0) with
/// grad y^T grad y = (U^2)'. All fields are evaluated in closed form except the
/// arc-length integral in phi.
class ProfileIsometry {
 public:
  ProfileIsometry(const Profile& g, const Vec2& direction, const Well& well, const MidplaneGrid& grid);

  const Profile& profile() const { return g_; }
  const Vec2& direction() const { return n_; }
  const Well& well() const { return well_; }
  const Mat2& metric_root() const { return A_; }

  const Deformation& deformation() const { return y_; }
  const Field<double>& v() const { return v_; }
  const Field<Vec2>& grad_v() const { return grad_v_; }
  const Field<Mat2>& hess_v() const { return hess_v_; }
  const Field<Vec3>& nu() const { return nu_; }
  const Field<Mat32>& grad_nu() const { return grad_nu_; }

  /// |U^-1 e3| sup |grad v A^-1| over the grid.
  double slope_quantity() const { return slope_; }
  /// Whether the sharper 1/2 bound of the quantitative estimates holds.
  bool quantitative_bound_holds() const { return slope_ < 0.5; }

  /// v, grad v, hess v of the profile at a point.
  double v_at(const Vec2& x) const;
  Vec2 grad_v_at(const Vec2& x) const;
  Mat2 hess_v_at(const Vec2& x) const;

 private:
  Profile g_;
  Vec2 n_;
  Well well_;
  Mat2 A_;
  double slope_ = 0.0;
  Deformation y_;
  Field<double> v_;
  Field<Vec2> grad_v_;
  Field<Mat2> hess_v_;
  Field<Vec3> nu_;
  Field<Mat32> grad_nu_;
};

ProfileIsometry isometry_lift_profile(const Profile& g, const Vec2& direction, const Well& well,
                                      const MidplaneGrid& grid);

/// int_0^t (sqrt(1 - c^2 g'(s)^2) - 1) ds by composite Simpson.
double arc_length_defect(const Profile& g, double c, double t, double max_panel = 1.0 / 128);

struct SecondFormRow {
  double epsilon;
  double defect;
};

struct SecondFormTable {
  std::vector<SecondFormRow> rows;
  std::optional<double> slope;  ///< log-log fit of defect against epsilon
  bool degenerate = false;      ///< fewer than two usable rows
};

/// d(eps) = max-node |grad y_eps^T grad nu_eps + eps hess v| for each lift in the family.
SecondFormTable second_form_defect(const std::vector<std::pair<double, Deformation>>& family,
                                   const Field<Mat2>& hess_v, const Well& well, int interior_margin = 0);

/// Fits log y = a + b log x by least squares and returns b.
double fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace mwplate
