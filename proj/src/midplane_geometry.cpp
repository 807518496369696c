#include "mwplate/midplane_geometry.hpp"

#include <sstream>

namespace mwplate {

Deformation Deformation::from_samples(const Field<Vec3>& y) {
  const auto s = second_derivatives(y);
  return {y, gradient(y), s.d11, s.d12, s.d22};
}

MetricResidual metric_residual(const Field<Mat32>& grad_y, const Well& well, int interior_margin) {
  const Mat2 target = well.planar_metric();
  MetricResidual r;
  const MidplaneGrid& grid = grad_y.grid();
  for (int k = 0; k < grad_y.size(); ++k) {
    if (interior_margin > 0 && !grid.is_interior(k, interior_margin)) continue;
    const double e = (grad_y[k].transpose() * grad_y[k] - target).norm();
    if (e > r.max || r.worst_node < 0) {
      r.max = e;
      r.worst_node = k;
    }
  }
  return r;
}

Vec3 normal_vector(const Mat32& grad_y, const Well& well) {
  const Mat3& Ui = well.inverse();
  const Vec3 b = Ui.col(2);
  const double c2 = b.squaredNorm();
  Vec3 nu = Ui.determinant() * grad_y.col(0).cross(grad_y.col(1));
  for (int k = 0; k < 2; ++k) nu -= Ui.col(k).dot(b) * grad_y.col(k);
  return nu / c2;
}

Mat32 normal_vector_gradient(const Mat32& grad_y, const Vec3& y11, const Vec3& y12, const Vec3& y22,
                             const Well& well) {
  const Mat3& Ui = well.inverse();
  const Vec3 b = Ui.col(2);
  const double c2 = b.squaredNorm();
  const double det = Ui.determinant();
  const double b1 = Ui.col(0).dot(b), b2 = Ui.col(1).dot(b);
  const Vec3 y1 = grad_y.col(0), y2 = grad_y.col(1);
  Mat32 out;
  out.col(0) = (det * (y11.cross(y2) + y1.cross(y12)) - b1 * y11 - b2 * y12) / c2;
  out.col(1) = (det * (y12.cross(y2) + y1.cross(y22)) - b1 * y12 - b2 * y22) / c2;
  return out;
}

Field<Vec3> normal_vector_nu(const Field<Mat32>& grad_y, const Well& well, double tolerance) {
  const MetricResidual r = metric_residual(grad_y, well);
  if (r.max > tolerance) {
    std::ostringstream msg;
    const Vec2 x = grad_y.grid().point(r.worst_node);
    msg << "normal_vector_nu: grad y^T grad y differs from (U^2)' by " << r.max << " at node "
        << r.worst_node << " (x = " << x(0) << ", " << x(1) << "), tolerance " << tolerance;
    throw MetricError(msg.str(), r.worst_node, r.max);
  }
  return grad_y.map([&](const Mat32& G) { return normal_vector(G, well); });
}

Field<Mat32> normal_vector_nu_gradient(const Deformation& y, const Well& well) {
  std::vector<Mat32> out(y.y.size());
  for (int k = 0; k < y.y.size(); ++k)
    out[k] = normal_vector_gradient(y.grad[k], y.y11[k], y.y12[k], y.y22[k], well);
  return Field<Mat32>(y.grid(), std::move(out));
}

Mat2 metric_square_root(const Well& well) {
  Eigen::SelfAdjointEigenSolver<Mat2> eig(well.planar_metric());
  return eig.operatorSqrt();
}

double arc_length_defect(const Profile& g, double c, double t, double max_panel) {
  if (t == 0.0) return 0.0;
  int panels = static_cast<int>(std::ceil(std::abs(t) / max_panel));
  panels = std::max(2, panels + (panels % 2));
  const double step = t / panels;
  auto f = [&](double s) {
    const double slope = c * g.derivative(1, s);
    return std::sqrt(1.0 - slope * slope) - 1.0;
  };
  double acc = f(0.0) + f(t);
  for (int k = 1; k < panels; ++k) acc += (k % 2 ? 4.0 : 2.0) * f(k * step);
  return acc * step / 3.0;
}

ProfileIsometry::ProfileIsometry(const Profile& g, const Vec2& direction, const Well& well,
                                 const MidplaneGrid& grid)
    : g_(g), n_(direction.normalized()), well_(well), A_(metric_square_root(well)) {
  if (!(direction.norm() > 0.0)) throw std::invalid_argument("isometry_lift_profile: zero direction");
  const double c = well_.normal_direction().norm();
  const Vec2 An = A_ * n_;
  const Vec2 Ainv_n = A_.inverse() * n_;
  const Vec3 b = well_.normal_direction();
  const Mat32 U12 = well_.matrix().leftCols<2>();

  double tmin = 0.0, tmax = 0.0;
  for (int k = 0; k < grid.size(); ++k) {
    const double t = An.dot(grid.point(k));
    tmin = std::min(tmin, t);
    tmax = std::max(tmax, t);
  }
  slope_ = c * g_.max_slope(tmin, tmax);
  if (!(slope_ < 1.0)) {
    std::ostringstream msg;
    msg << "isometry_lift_profile: |U^-1 e3| sup|grad v A^-1| = " << slope_
        << " violates the existence hypothesis (< 1)";
    throw std::domain_error(msg.str());
  }

  const int N = grid.size();
  std::vector<Vec3> y(N), y11(N), y12(N), y22(N), nu(N);
  std::vector<Mat32> grad(N), grad_nu(N);
  std::vector<double> v(N);
  std::vector<Vec2> gv(N);
  std::vector<Mat2> hv(N);
  for (int k = 0; k < N; ++k) {
    const Vec2 x = grid.point(k);
    const double t = An.dot(x);
    const double g1 = g_.derivative(1, t), g2 = g_.derivative(2, t);
    const double s = std::sqrt(1.0 - c * c * g1 * g1);
    const double ds = -c * c * g1 * g2 / s;
    const Vec2 phi = x + arc_length_defect(g_, c, t) * Ainv_n;
    const Mat2 grad_phi = Mat2::Identity() + (s - 1.0) * Ainv_n * An.transpose();

    v[k] = g_(t);
    gv[k] = g1 * An;
    hv[k] = g2 * An * An.transpose();
    y[k] = v[k] * b + U12 * phi;
    grad[k] = b * gv[k].transpose() + U12 * grad_phi;
    const Vec3 curvature = U12 * Ainv_n;
    y11[k] = hv[k](0, 0) * b + ds * An(0) * An(0) * curvature;
    y12[k] = hv[k](0, 1) * b + ds * An(0) * An(1) * curvature;
    y22[k] = hv[k](1, 1) * b + ds * An(1) * An(1) * curvature;
    nu[k] = normal_vector(grad[k], well_);
    grad_nu[k] = normal_vector_gradient(grad[k], y11[k], y12[k], y22[k], well_);
  }
  y_ = {Field<Vec3>(grid, std::move(y)), Field<Mat32>(grid, std::move(grad)), Field<Vec3>(grid, std::move(y11)),
        Field<Vec3>(grid, std::move(y12)), Field<Vec3>(grid, std::move(y22))};
  v_ = Field<double>(grid, std::move(v));
  grad_v_ = Field<Vec2>(grid, std::move(gv));
  hess_v_ = Field<Mat2>(grid, std::move(hv));
  nu_ = Field<Vec3>(grid, std::move(nu));
  grad_nu_ = Field<Mat32>(grid, std::move(grad_nu));
}

double ProfileIsometry::v_at(const Vec2& x) const { return g_((A_ * n_).dot(x)); }

Vec2 ProfileIsometry::grad_v_at(const Vec2& x) const {
  const Vec2 An = A_ * n_;
  return g_.derivative(1, An.dot(x)) * An;
}

Mat2 ProfileIsometry::hess_v_at(const Vec2& x) const {
  const Vec2 An = A_ * n_;
  return g_.derivative(2, An.dot(x)) * An * An.transpose();
}

ProfileIsometry isometry_lift_profile(const Profile& g, const Vec2& direction, const Well& well,
                                      const MidplaneGrid& grid) {
  return ProfileIsometry(g, direction, well, grid);
}

double fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const int n = static_cast<int>(x.size());
  if (n < 2 || y.size() != x.size()) throw std::invalid_argument("fit_loglog_slope: need two points");
  double mx = 0, my = 0;
  for (int k = 0; k < n; ++k) {
    mx += std::log(x[k]) / n;
    my += std::log(y[k]) / n;
  }
  double sxy = 0, sxx = 0;
  for (int k = 0; k < n; ++k) {
    const double dx = std::log(x[k]) - mx;
    sxy += dx * (std::log(y[k]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

SecondFormTable second_form_defect(const std::vector<std::pair<double, Deformation>>& family,
                                   const Field<Mat2>& hess_v, const Well& well, int interior_margin) {
  SecondFormTable table;
  for (const auto& [eps, y] : family) {
    const Field<Mat32> grad_nu = normal_vector_nu_gradient(y, well);
    double worst = 0.0;
    for (int k = 0; k < y.y.size(); ++k) {
      if (interior_margin > 0 && !y.grid().is_interior(k, interior_margin)) continue;
      const Mat2 form = y.grad[k].transpose() * grad_nu[k];
      worst = std::max(worst, (form + eps * hess_v[k]).norm());
    }
    table.rows.push_back({eps, worst});
  }
  std::vector<double> xs, ys;
  for (const auto& r : table.rows) {
    if (r.defect > 0.0 && r.epsilon > 0.0) {
      xs.push_back(r.epsilon);
      ys.push_back(r.defect);
    }
  }
  if (xs.size() >= 2) {
    table.slope = fit_loglog_slope(xs, ys);
  } else {
    table.degenerate = true;
  }
  return table;
}

}  // namespace mwplate
