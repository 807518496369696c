#include "mwplate/rotations.hpp"

#include <sstream>

namespace mwplate {

namespace {

Polynomial2 times_coordinate(const Polynomial2& p, int axis) {
  std::vector<Polynomial2::Term> terms = p.terms();
  for (auto& t : terms) (axis == 0 ? t.a : t.b) += 1;
  return Polynomial2(std::move(terms));
}

}  // namespace

Mat3 load_moments(const LoadField& load) {
  Mat3 P = Mat3::Zero();
  const MidplaneGrid& grid = load.grid();
  if (load.polynomials()) {
    const auto& f = *load.polynomials();
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 2; ++j) P(i, j) = integrate_exact(times_coordinate(f[i], j), grid);
    return P;
  }
  const Eigen::VectorXd& w = grid.weights();
  for (int k = 0; k < grid.size(); ++k) {
    const Vec2 x = grid.point(k);
    P.leftCols<2>() += w(k) * load.f()[k] * x.transpose();
  }
  return P;
}

MomentMatrix moment_matrix(const LoadField& load, const Well& well, std::size_t index) {
  return {load_moments(load) * well.matrix(), index};
}

double load_functional(const LoadField& load, const Mat3& A) {
  const MidplaneGrid& grid = load.grid();
  const Eigen::VectorXd& w = grid.weights();
  double acc = 0.0;
  for (int k = 0; k < grid.size(); ++k) {
    const Vec2 x = grid.point(k);
    acc += w(k) * load.f()[k].dot(A * Vec3(x(0), x(1), 0.0));
  }
  return acc;
}

double RotationSet::first_order_residual() const {
  const Mat3 G = representative.transpose() * moment;
  return skw(G).norm();
}

double RotationSet::second_order_max() const {
  Eigen::SelfAdjointEigenSolver<Mat3> eig(N, Eigen::EigenvaluesOnly);
  return eig.eigenvalues()(2);
}

double RotationSet::fluctuation(const Mat3& R, const Vec3& w) const {
  const Mat3 W = skew(w);
  return (W * W).cwiseProduct(R.transpose() * moment).sum();
}

Mat3 RotationSet::point(const Eigen::VectorXd& theta) const {
  if (theta.size() != tangent.cols()) throw std::invalid_argument("RotationSet::point: wrong coordinate count");
  if (theta.size() == 0) return representative;
  return representative * exp_skew(Vec3(tangent * theta));
}

RotationSet rotation_set(const MomentMatrix& moment, double tolerance) {
  RotationSet set;
  set.well = moment.well;
  set.moment = moment.M;
  const auto best = procrustes_max<double>(moment.M);
  set.value = best.value;
  set.representative = best.rotation;
  const Mat3 G = best.rotation.transpose() * moment.M;
  set.N = sym(G) - G.trace() * Mat3::Identity();

  Eigen::SelfAdjointEigenSolver<Mat3> eig(set.N);
  const double scale = set.N.norm();
  std::vector<int> null, range;
  for (int k = 0; k < 3; ++k) {
    if (scale == 0.0 || std::abs(eig.eigenvalues()(k)) <= tolerance * scale) {
      null.push_back(k);
    } else {
      range.push_back(k);
    }
  }
  set.dimension = static_cast<int>(null.size());
  set.tangent.resize(3, null.size());
  set.normal.resize(3, range.size());
  for (std::size_t i = 0; i < null.size(); ++i) set.tangent.col(i) = eig.eigenvectors().col(null[i]);
  for (std::size_t i = 0; i < range.size(); ++i) set.normal.col(i) = eig.eigenvectors().col(range[i]);
  return set;
}

int rotation_set_dimension(const RotationSet& set) { return set.dimension; }

WellMaximization maximize_over_wells(const LoadField& load, const std::vector<Well>& wells, double tolerance) {
  if (wells.empty()) throw std::invalid_argument("maximize_over_wells: no wells");
  WellMaximization out;
  const Mat3 P = load_moments(load);
  for (std::size_t j = 0; j < wells.size(); ++j) out.sets.push_back(rotation_set({P * wells[j].matrix(), j}));
  out.best = out.sets.front().value;
  for (const auto& s : out.sets) out.best = std::max(out.best, s.value);
  for (std::size_t j = 0; j < wells.size(); ++j)
    if (out.best - out.sets[j].value <= tolerance * std::abs(out.best)) out.lambda.push_back(j);
  return out;
}

namespace {

// log(e^{-[T theta]} R*^T R) as an axial vector.
Vec3 offset(const RotationSet& set, const Mat3& R, const Eigen::VectorXd& theta) {
  return log_rotation<double>(Mat3(set.point(theta).transpose() * R));
}

Eigen::VectorXd local_descent(const RotationSet& set, const Mat3& R, Eigen::VectorXd theta) {
  const int m = static_cast<int>(theta.size());
  double f = offset(set, R, theta).squaredNorm();
  for (int iter = 0; iter < 200; ++iter) {
    const Vec3 r = offset(set, R, theta);
    Eigen::Matrix<double, 3, Eigen::Dynamic> J(3, m);
    const double step = 1e-7;
    for (int i = 0; i < m; ++i) {
      Eigen::VectorXd tp = theta, tm = theta;
      tp(i) += step;
      tm(i) -= step;
      J.col(i) = (offset(set, R, tp) - offset(set, R, tm)) / (2.0 * step);
    }
    const Eigen::VectorXd delta = (J.transpose() * J + 1e-14 * Eigen::MatrixXd::Identity(m, m)).ldlt().solve(-J.transpose() * r);
    double t = 1.0;
    bool moved = false;
    for (int k = 0; k < 30; ++k, t *= 0.5) {
      const Eigen::VectorXd trial = theta + t * delta;
      const double ft = offset(set, R, trial).squaredNorm();
      if (ft < f) {
        theta = trial;
        f = ft;
        moved = true;
        break;
      }
    }
    if (!moved || delta.norm() < 1e-14) break;
  }
  return theta;
}

std::vector<Eigen::VectorXd> starts(int m) {
  std::vector<Eigen::VectorXd> out;
  const double pi = std::numbers::pi;
  if (m == 1) {
    for (int k = 0; k < 9; ++k) out.push_back(Eigen::VectorXd::Constant(1, -pi + 2.0 * pi * k / 9.0));
  } else if (m == 2) {
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) out.push_back(Eigen::Vector2d(-2.0 * pi / 3 * (a - 1), -2.0 * pi / 3 * (b - 1)));
  } else {
    out.push_back(Eigen::Vector3d::Zero());
    for (int s = 0; s < 8; ++s)
      out.push_back(Eigen::Vector3d(s & 1 ? 1.5 : -1.5, s & 2 ? 1.5 : -1.5, s & 4 ? 1.5 : -1.5));
  }
  out.insert(out.begin(), Eigen::VectorXd::Zero(m));
  out.resize(9);
  return out;
}

}  // namespace

Projection project_to_set(const Mat3& R, const RotationSet& set, double max_distance) {
  const int m = static_cast<int>(set.tangent.cols());
  Eigen::VectorXd best_theta = Eigen::VectorXd::Zero(m);
  double best = offset(set, R, best_theta).norm();
  if (m > 0) {
    for (const auto& start : starts(m)) {
      const Eigen::VectorXd theta = local_descent(set, R, start);
      const double d = offset(set, R, theta).norm();
      if (d < best) {
        best = d;
        best_theta = theta;
      }
    }
  }
  if (best > max_distance) {
    std::ostringstream msg;
    msg << "project_to_set: rotation is at distance " << best << " from the set, beyond the projection radius "
        << max_distance;
    throw std::domain_error(msg.str());
  }
  const Mat3 P = set.point(best_theta);
  return {P, best, offset(set, R, best_theta)};
}

double assemble_limit_objective(const PlateState& state, const LoadField& load, const RotationSet& set,
                                const Mat3& R, const Vec3& w, Regime regime, const RelaxedForm& form) {
  const double slack = 1e-8 * std::abs(set.value) + 1e-14;
  const double value = set.moment.cwiseProduct(R).sum();
  if (std::abs(value - set.value) > slack) {
    std::ostringstream msg;
    msg << "assemble_limit_objective: R is not a maximizer of well " << set.well + 1 << " (F = " << value
        << ", optimum " << set.value << ")";
    throw std::invalid_argument(msg.str());
  }
  if (set.tangent.cols() > 0 && (set.tangent.transpose() * w).norm() > 1e-8 * std::max(1.0, w.norm())) {
    throw std::invalid_argument("assemble_limit_objective: fluctuation generator is not normal to the rotation set");
  }
  double energy = 0.0;
  switch (regime) {
    case Regime::lvk: energy = energy_lvk(state, form); break;
    case Regime::vk: energy = energy_vk(state, form); break;
    case Regime::cvk: energy = energy_cvk(state, form); break;
    case Regime::kirchhoff:
      throw std::invalid_argument("assemble_limit_objective: the load problem is posed for alpha > 2 only");
  }
  return energy - force_work(state, load, R, form.well()) - set.fluctuation(R, w);
}

}  // namespace mwplate
