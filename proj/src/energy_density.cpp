#include "mwplate/energy_density.hpp"

#include "mwplate/sampling.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace mwplate {

std::string to_string(DensityKind kind) {
  switch (kind) {
    case DensityKind::canonical_dist: return "canonical_dist";
    case DensityKind::green_lagrange: return "green_lagrange";
  }
  return "unknown";
}

DensityKind density_kind_from_string(const std::string& name) {
  if (name == "canonical_dist") return DensityKind::canonical_dist;
  if (name == "green_lagrange") return DensityKind::green_lagrange;
  throw std::invalid_argument("unknown density kind '" + name +
                              "' (expected canonical_dist or green_lagrange)");
}

double growth_function(double t, double q) { return std::min(t * t, std::pow(t, q)); }

MultiWellModel::MultiWellModel(std::vector<Well> wells, DensityKind kind, double q, double p,
                               double well_scale)
    : wells_(std::move(wells)), kind_(kind), q_(q), p_(p), well_scale_(well_scale) {
  if (wells_.empty()) throw std::invalid_argument("MultiWellModel: at least one well required");
  if (!(q_ >= 0.0 && q_ <= 2.0)) throw std::invalid_argument("MultiWellModel: q must lie in [0,2]");
  if (!(p_ > 1.0)) throw std::invalid_argument("MultiWellModel: p must exceed 1");
  if (!(well_scale_ > 0.0)) throw std::invalid_argument("MultiWellModel: well_scale must be positive");
}

double MultiWellModel::well_density(std::size_t j, const Mat3& F) const {
  const Well& w = wells_[j];
  switch (kind_) {
    case DensityKind::canonical_dist:
      return growth_function(dist_to_well(F, w), q_);
    case DensityKind::green_lagrange: {
      const Mat3 E = w.inverse() * F.transpose() * F * w.inverse() - Mat3::Identity();
      return 0.25 * E.squaredNorm();
    }
  }
  return 0.0;
}

double MultiWellModel::density(const Mat3& F) const {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < wells_.size(); ++j) best = std::min(best, well_density(j, F));
  return best;
}

double MultiWellModel::distance_to_wells(const Mat3& F) const {
  double best = std::numeric_limits<double>::infinity();
  for (const Well& w : wells_) best = std::min(best, dist_to_well(F, w));
  return best;
}

std::vector<std::pair<std::size_t, std::size_t>> MultiWellModel::overlapping_wells() const {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t i = 0; i < wells_.size(); ++i) {
    for (std::size_t j = i + 1; j < wells_.size(); ++j) {
      const Mat3 P = wells_[j].inverse() * wells_[i].matrix();
      Eigen::JacobiSVD<Mat3> svd(P);
      if ((svd.singularValues() - Vec3::Ones()).norm() <= 1e-8 && P.determinant() > 0.0) {
        out.emplace_back(i, j);
      }
    }
  }
  return out;
}

QuadraticForm3::QuadraticForm3(const Mat9& coefficients, std::size_t well)
    : H_((coefficients + coefficients.transpose()) / 2.0), well_(well) {
  if ((coefficients - coefficients.transpose()).cwiseAbs().maxCoeff() >
      1e-12 * std::max(1.0, coefficients.cwiseAbs().maxCoeff())) {
    throw std::invalid_argument("QuadraticForm3: coefficient array is not symmetric");
  }
}

Mat9 symmetric_strain_map(const Well& well) {
  Mat9 S;
  for (int a = 0; a < 9; ++a) {
    Mat3 E = Mat3::Zero();
    E(a / 3, a % 3) = 1.0;
    S.col(a) = vec9(sym(Mat3(E * well.inverse())));
  }
  return S;
}

std::array<Mat3, 6> symmetric_basis() {
  const double r = 1.0 / std::sqrt(2.0);
  std::array<Mat3, 6> B;
  for (auto& b : B) b.setZero();
  B[0](0, 0) = 1.0;
  B[1](1, 1) = 1.0;
  B[2](2, 2) = 1.0;
  B[3](1, 2) = B[3](2, 1) = r;
  B[4](0, 2) = B[4](2, 0) = r;
  B[5](0, 1) = B[5](1, 0) = r;
  return B;
}

QuadraticForm3 green_lagrange_form(const Well& well, std::size_t index) {
  const Mat9 S = symmetric_strain_map(well);
  return QuadraticForm3(2.0 * S.transpose() * S, index);
}

QuadraticForm3 anisotropic_form(const Well& well, const Eigen::Matrix<double, 6, 6>& C,
                                std::size_t index) {
  Eigen::Matrix<double, 6, 9> P;
  const auto basis = symmetric_basis();
  for (int k = 0; k < 6; ++k) P.row(k) = vec9(basis[k]).transpose();
  const Eigen::Matrix<double, 6, 9> PS = P * symmetric_strain_map(well);
  const Eigen::Matrix<double, 6, 6> Cs = (C + C.transpose()) / 2.0;
  return QuadraticForm3(PS.transpose() * Cs * PS, index);
}

namespace {

Mat9 central_hessian(const MultiWellModel& model, std::size_t j, double eps) {
  const Mat3 U = model.well(j).matrix();
  auto W = [&](int a, double da, int b, double db) {
    Mat3 F = U;
    F(a / 3, a % 3) += da;
    F(b / 3, b % 3) += db;
    return model.density(F);
  };
  const double w0 = model.density(U);
  Mat9 H;
  for (int a = 0; a < 9; ++a) {
    H(a, a) = (W(a, eps, a, 0.0) - 2.0 * w0 + W(a, -eps, a, 0.0)) / (eps * eps);
    for (int b = a + 1; b < 9; ++b) {
      H(a, b) = (W(a, eps, b, eps) - W(a, eps, b, -eps) - W(a, -eps, b, eps) +
                 W(a, -eps, b, -eps)) /
                (4.0 * eps * eps);
      H(b, a) = H(a, b);
    }
  }
  return H;
}

}  // namespace

QuadraticForm3 finite_difference_hessian(const MultiWellModel& model, std::size_t j,
                                         double step) {
  const Mat9 coarse = central_hessian(model, j, step);
  const Mat9 fine = central_hessian(model, j, step / 2.0);
  const double scale = std::max(1.0, fine.cwiseAbs().maxCoeff());
  const double residual = (coarse - fine).cwiseAbs().maxCoeff();
  if (residual > 1e-3 * scale) {
    std::ostringstream msg;
    msg << "finite_difference_hessian: well " << j + 1
        << " did not converge, max |H(h) - H(h/2)| = " << residual;
    throw std::runtime_error(msg.str());
  }
  return QuadraticForm3((4.0 * fine - coarse) / 3.0, j);
}

QuadraticForm3 hessian_Q(const MultiWellModel& model, std::size_t j) {
  if (j >= model.size()) throw std::out_of_range("hessian_Q: well index out of range");
  if (model.kind() == DensityKind::green_lagrange) return green_lagrange_form(model.well(j), j);
  return finite_difference_hessian(model, j);
}

double coercivity_constant(const QuadraticForm3& Q, const Well& well) {
  const auto basis = symmetric_basis();
  Eigen::Matrix<double, 6, 6> G;
  for (int k = 0; k < 6; ++k)
    for (int l = 0; l < 6; ++l)
      G(k, l) = Q.bilinear(well.inverse() * basis[k], well.inverse() * basis[l]);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, 6, 6>> eig((G + G.transpose()) / 2.0,
                                                                 Eigen::EigenvaluesOnly);
  return eig.eigenvalues()(0);
}

bool HypothesisReport::all_ok() const {
  bool ok = frame_indifference_ok && lower_bound_ok && disjoint_ok && penalty_exponent_ok;
  for (const auto& w : wells) ok = ok && w.zero_ok && w.symmetry_ok && w.coercivity_ok;
  return ok;
}

HypothesisReport check_hypotheses(const MultiWellModel& model, std::uint64_t seed) {
  Rng rng(seed);
  HypothesisReport report;
  // FD Hessians carry ~1e-8 truncation/roundoff noise; closed forms are exact.
  const double symmetry_tolerance = model.kind() == DensityKind::green_lagrange ? 1e-10 : 1e-6;

  for (std::size_t j = 0; j < model.size(); ++j) {
    const Well& well = model.well(j);
    WellReport w;
    w.density_at_well = model.density(well.matrix());
    w.zero_ok = std::abs(w.density_at_well) < 1e-14;
    const QuadraticForm3 Q = hessian_Q(model, j);
    for (int k = 0; k < 100; ++k) {
      const Mat3 A = random_matrix(rng);
      const Mat3 reduced = well.inverse() * sym(Mat3(well.matrix() * A));
      w.symmetry_residual = std::max(w.symmetry_residual, std::abs(Q(A) - Q(reduced)));
    }
    w.symmetry_ok = w.symmetry_residual < symmetry_tolerance * std::max(1.0, Q.coefficients().norm());
    w.coercivity = coercivity_constant(Q, well);
    w.coercivity_ok = w.coercivity > 0.0;
    report.wells.push_back(w);
  }

  for (int k = 0; k < 100; ++k) {
    const Mat3 R = random_rotation(rng);
    const Mat3 F = random_matrix(rng, 2.0);
    const double wf = model.density(F);
    report.frame_indifference_residual = std::max(
        report.frame_indifference_residual, std::abs(model.density(R * F) - wf) / std::max(1.0, wf));
  }
  report.frame_indifference_ok = report.frame_indifference_residual < 1e-12;

  double best = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 1000; ++k) {
    const Mat3 F = random_matrix(rng, 2.0);
    const double f = growth_function(model.distance_to_wells(F), model.q());
    if (f > 1e-12) best = std::min(best, model.density(F) / f);
  }
  report.lower_bound_constant = best;
  report.lower_bound_ok = best >= model.well_scale() * (1.0 - 1e-12);
  report.disjoint_ok = model.overlapping_wells().empty();
  report.penalty_exponent_ok = model.q() >= 2.0 || model.p() > 1.2;
  return report;
}

}  // namespace mwplate
