#include "mwplate/recovery.hpp"

#include <fstream>
#include <iomanip>
#include <memory>
#include <sstream>

namespace mwplate {

std::string to_string(Regime regime) {
  switch (regime) {
    case Regime::kirchhoff: return "kirchhoff";
    case Regime::cvk: return "cvk";
    case Regime::vk: return "vk";
    case Regime::lvk: return "lvk";
  }
  return "unknown";
}

Regime regime_from_string(const std::string& name) {
  if (name == "kirchhoff") return Regime::kirchhoff;
  if (name == "cvk") return Regime::cvk;
  if (name == "vk") return Regime::vk;
  if (name == "lvk") return Regime::lvk;
  throw std::invalid_argument("unknown regime '" + name + "' (expected kirchhoff, cvk, vk or lvk)");
}

Regime regime_for_alpha(double alpha) {
  if (!(alpha >= 2.0)) throw std::invalid_argument("regime_for_alpha: alpha must be at least 2");
  if (alpha == 2.0) return Regime::kirchhoff;
  if (alpha < 4.0) return Regime::cvk;
  if (alpha == 4.0) return Regime::vk;
  return Regime::lvk;
}

PenaltySchedule make_schedule(double alpha, double p, double q) {
  if (!(alpha >= 2.0)) throw std::invalid_argument("make_schedule: alpha must be at least 2");
  if (!(p > 1.0)) throw std::invalid_argument("make_schedule: p must exceed 1");
  PenaltySchedule s{};
  s.alpha = alpha;
  s.gamma = alpha / 2.0;
  s.q = q;
  s.requested_p = p;
  s.s_max = alpha / 3.0;
  auto lower = [&](double pp) { return std::max(0.0, 1.0 - s.gamma * (1.0 - 2.0 / pp)); };
  auto admissible = [&](double pp) { return lower(pp) < s.s_max && (q >= 2.0 || pp > 1.2); };
  while (!admissible(p)) {
    p += 0.5;
    s.p_raised = true;
  }
  s.p = p;
  s.s_min = lower(p);
  s.s = 0.5 * (s.s_min + s.s_max);
  return s;
}

RecoveryFamily::RecoveryFamily(Regime regime, double alpha, std::size_t well, GridPtr grid, Builder builder)
    : regime_(regime), alpha_(alpha), well_(well), grid_(std::move(grid)), builder_(std::move(builder)) {}

namespace {

Layer rotate(const Layer& L, const Mat3& R) {
  auto rv = [&](const Vec3& x) { return Vec3(R * x); };
  return {L.c.map(rv), L.grad.map([&](const Mat32& G) { return Mat32(R * G); }), L.d11.map(rv), L.d12.map(rv),
          L.d22.map(rv)};
}

// Second derivatives from the first by one more difference.
Layer layer_from(const Field<Vec3>& c, const Field<Mat32>& G) {
  const Field<Vec3> g1 = G.map([](const Mat32& m) { return Vec3(m.col(0)); });
  const Field<Vec3> g2 = G.map([](const Mat32& m) { return Vec3(m.col(1)); });
  const Field<Vec3> d11 = derivative(g1, 0), d22 = derivative(g2, 1);
  const Field<Vec3> a = derivative(g1, 1), b = derivative(g2, 0);
  std::vector<Vec3> d12(c.size());
  for (int k = 0; k < c.size(); ++k) d12[k] = 0.5 * (a[k] + b[k]);
  return {c, G, d11, Field<Vec3>(c.grid(), std::move(d12)), d22};
}

Layer layer_fd(const Field<Vec3>& c) {
  const auto s = second_derivatives(c);
  return {c, gradient(c), s.d11, s.d12, s.d22};
}

Layer zero_layer(const MidplaneGrid& grid) {
  const Field<Vec3> z(grid, Vec3::Zero());
  return {z, Field<Mat32>(grid, Mat32::Zero()), z, z, z};
}

// sum_i w_i L_i
Layer combine(const MidplaneGrid& grid, std::initializer_list<std::pair<double, const Layer*>> terms) {
  Layer out = zero_layer(grid);
  for (const auto& [w, L] : terms) {
    if (w == 0.0) continue;
    for (int k = 0; k < grid.size(); ++k) {
      out.c[k] += w * L->c[k];
      out.grad[k] += w * L->grad[k];
      out.d11[k] += w * L->d11[k];
      out.d12[k] += w * L->d12[k];
      out.d22[k] += w * L->d22[k];
    }
  }
  return out;
}

Vec3 embed2(const Vec2& a) { return Vec3(a(0), a(1), 0.0); }

struct VonKarmanPieces {
  Layer flat, u, v, normal, tilt, zeta, xi;
};

RecoveryFamily build_von_karman(const PlateState& state, const RelaxedForm& form, Regime regime, double alpha) {
  if (!state.has_displacements()) throw std::invalid_argument("build_recovery: state has no (u, v) fields");
  const MidplaneGrid& grid = state.grid();
  const Well& well = form.well();
  const Mat3& U = well.matrix();
  const Mat3& Ui = well.inverse();
  const Vec3 b = well.normal_direction();
  const double c2 = b.squaredNorm();
  const Mat32 U12 = U.leftCols<2>();
  const int N = grid.size();

  auto pieces = std::make_shared<VonKarmanPieces>();
  {
    const Field<Vec3> c = Field<Vec3>::sample(grid, [&](const Vec2& x) { return Vec3(U12 * x); });
    const Field<Vec3> z(grid, Vec3::Zero());
    pieces->flat = {c, Field<Mat32>(grid, U12), z, z, z};
  }
  {
    const Field<Vec3> c = state.u().map([&](const Vec2& u) { return Vec3(Ui * embed2(u)); });
    const Field<Mat32> G = state.grad_u().map([&](const Mat2& g) {
      Eigen::Matrix<double, 3, 2> m = Eigen::Matrix<double, 3, 2>::Zero();
      m.topRows<2>() = g;
      return Mat32(Ui * m);
    });
    pieces->u = layer_from(c, G);
  }
  {
    std::vector<Vec3> c(N), d11(N), d12(N), d22(N);
    std::vector<Mat32> G(N);
    for (int k = 0; k < N; ++k) {
      c[k] = state.v()[k] * b;
      G[k] = b * state.grad_v()[k].transpose();
      const Mat2& H = state.hess_v()[k];
      d11[k] = H(0, 0) * b;
      d12[k] = H(0, 1) * b;
      d22[k] = H(1, 1) * b;
    }
    pieces->v = {Field<Vec3>(grid, c), Field<Mat32>(grid, G), Field<Vec3>(grid, d11), Field<Vec3>(grid, d12),
                 Field<Vec3>(grid, d22)};
  }
  {
    const Field<Vec3> z(grid, Vec3::Zero());
    pieces->normal = {Field<Vec3>(grid, Vec3(U.col(2))), Field<Mat32>(grid, Mat32::Zero()), z, z, z};
  }
  {
    const Field<Vec3> c = state.grad_v().map([&](const Vec2& g) { return Vec3(-Ui * embed2(g)); });
    const Field<Mat32> G = state.hess_v().map([&](const Mat2& H) {
      Eigen::Matrix<double, 3, 2> m = Eigen::Matrix<double, 3, 2>::Zero();
      m.topRows<2>() = H;
      return Mat32(-Ui * m);
    });
    pieces->tilt = layer_from(c, G);
  }
  {
    std::vector<Vec3> zeta(N), xi(N);
    for (int k = 0; k < N; ++k) {
      const Mat2& Gu = state.grad_u()[k];
      const Vec2& gv = state.grad_v()[k];
      const Mat2 symu = 0.5 * (Gu + Gu.transpose());
      Vec3 z;
      if (regime == Regime::vk) {
        const Vec3 w = Ui * embed2(gv);
        z = -0.5 * w.squaredNorm() * Vec3::UnitZ() + b.dot(w) * embed2(gv) +
            2.0 * form.l_operator(Mat2(symu + 0.5 * c2 * gv * gv.transpose()));
      } else {
        z = 2.0 * form.l_operator(symu);
      }
      zeta[k] = Ui * z;
      xi[k] = 0.5 * Ui * (-2.0 * form.l_operator(state.hess_v()[k]));
    }
    pieces->zeta = layer_fd(Field<Vec3>(grid, std::move(zeta)));
    pieces->xi = layer_fd(Field<Vec3>(grid, std::move(xi)));
  }

  const GridPtr gp = state.grid_ptr();
  const double gamma = alpha / 2.0;
  auto builder = [pieces, gp, gamma](double h) {
    const MidplaneGrid& g = *gp;
    const double hg = std::pow(h, gamma);
    RecoveryLayers L;
    L.c0 = combine(g, {{1.0, &pieces->flat}, {hg, &pieces->u}, {hg / h, &pieces->v}});
    L.c1 = combine(g, {{h, &pieces->normal}, {hg, &pieces->tilt}, {hg * h, &pieces->zeta}});
    L.c2 = combine(g, {{hg * h, &pieces->xi}});
    return L;
  };
  return RecoveryFamily(regime, alpha, state.well(), gp, builder);
}

RecoveryFamily build_kirchhoff(const PlateState& state, const RelaxedForm& form, double alpha) {
  if (!state.has_deformation()) throw std::invalid_argument("build_recovery: kirchhoff state carries no y");
  const Deformation& y = state.deformation();
  const MidplaneGrid& grid = state.grid();
  const Well& well = form.well();
  const Field<Vec3> nu = normal_vector_nu(y.grad, well);
  const Field<Mat32> grad_nu = normal_vector_nu_gradient(y, well);
  std::vector<Vec3> xi(grid.size());
  for (int k = 0; k < grid.size(); ++k) {
    Mat3 frame;
    frame << y.grad[k], nu[k];
    const Mat3 R = frame * well.inverse();
    const Mat2 second = y.grad[k].transpose() * grad_nu[k];
    // half of xi = 2 R U^-1 L(grad y^T grad nu), the x3^2 coefficient being xi / 2
    xi[k] = R * well.inverse() * form.l_operator(second);
  }
  auto base = std::make_shared<std::array<Layer, 3>>();
  (*base)[0] = {y.y, y.grad, y.y11, y.y12, y.y22};
  (*base)[1] = layer_from(nu, grad_nu);
  (*base)[2] = layer_fd(Field<Vec3>(grid, std::move(xi)));
  const GridPtr gp = state.grid_ptr();
  auto builder = [base, gp](double h) {
    const MidplaneGrid& g = *gp;
    RecoveryLayers L;
    L.c0 = (*base)[0];
    L.c1 = combine(g, {{h, &(*base)[1]}});
    L.c2 = combine(g, {{h * h, &(*base)[2]}});
    return L;
  };
  return RecoveryFamily(Regime::kirchhoff, alpha, state.well(), gp, builder);
}

RecoveryFamily build_constrained(const PlateState& state, const RelaxedForm& form, double alpha) {
  if (!state.profile_source()) {
    throw std::invalid_argument("build_recovery: cvk regime needs a state built from a profile lift");
  }
  const auto source = *state.profile_source();
  const Well well = form.well();
  const GridPtr gp = state.grid_ptr();
  const double gamma = alpha / 2.0;

  std::vector<Vec3> xi(gp->size());
  for (int k = 0; k < gp->size(); ++k) xi[k] = 0.5 * well.inverse() * (-2.0 * form.l_operator(state.hess_v()[k]));
  auto correction = std::make_shared<Layer>(layer_fd(Field<Vec3>(*gp, std::move(xi))));

  // Fail early on a slope violation at the largest admissible amplitude.
  ProfileIsometry(source.profile, source.direction, well, *gp);

  auto builder = [source, well, gp, gamma, correction](double h) {
    const MidplaneGrid& g = *gp;
    const double eps = std::pow(h, gamma - 1.0);
    const ProfileIsometry lift(source.profile.scaled(eps), source.direction, well, g);
    const Deformation& y = lift.deformation();
    const Layer mid{y.y, y.grad, y.y11, y.y12, y.y22};
    const Layer normal = layer_from(lift.nu(), lift.grad_nu());
    RecoveryLayers L;
    L.c0 = mid;
    L.c1 = combine(g, {{h, &normal}});
    L.c2 = combine(g, {{std::pow(h, gamma + 1.0), correction.get()}});
    return L;
  };
  return RecoveryFamily(Regime::cvk, alpha, state.well(), gp, builder);
}

}  // namespace

RecoveryLayers RecoveryFamily::layers(double h) const {
  if (!(h > 0.0)) throw std::invalid_argument("RecoveryFamily: h must be positive");
  RecoveryLayers L = builder_(h);
  if (frame_ != Mat3::Identity()) {
    L.c0 = rotate(L.c0, frame_);
    L.c1 = rotate(L.c1, frame_);
    L.c2 = rotate(L.c2, frame_);
  }
  return L;
}

RecoveryFamily RecoveryFamily::rotated(const Mat3& R) const {
  RecoveryFamily out = *this;
  out.frame_ = R * frame_;
  return out;
}

RecoveryFamily build_recovery(const PlateState& state, const RelaxedForm& form, Regime regime, double alpha) {
  if (regime_for_alpha(alpha) != regime) {
    throw std::invalid_argument("build_recovery: regime " + to_string(regime) + " does not match alpha = " +
                                std::to_string(alpha));
  }
  switch (regime) {
    case Regime::kirchhoff: return build_kirchhoff(state, form, alpha);
    case Regime::cvk: return build_constrained(state, form, alpha);
    case Regime::vk:
    case Regime::lvk: return build_von_karman(state, form, regime, alpha);
  }
  throw std::logic_error("build_recovery: unreachable");
}

RescaledGradient rescaled_derivatives(const RecoveryLayers& L, int k, double x3, double h) {
  RescaledGradient out;
  const double x3s = x3 * x3;
  out.F.leftCols<2>() = L.c0.grad[k] + x3 * L.c1.grad[k] + x3s * L.c2.grad[k];
  out.F.col(2) = (L.c1.c[k] + 2.0 * x3 * L.c2.c[k]) / h;
  const Vec3 h11 = L.c0.d11[k] + x3 * L.c1.d11[k] + x3s * L.c2.d11[k];
  const Vec3 h12 = L.c0.d12[k] + x3 * L.c1.d12[k] + x3s * L.c2.d12[k];
  const Vec3 h22 = L.c0.d22[k] + x3 * L.c1.d22[k] + x3s * L.c2.d22[k];
  const Vec3 m1 = (L.c1.grad[k].col(0) + 2.0 * x3 * L.c2.grad[k].col(0)) / h;
  const Vec3 m2 = (L.c1.grad[k].col(1) + 2.0 * x3 * L.c2.grad[k].col(1)) / h;
  const Vec3 h33 = 2.0 * L.c2.c[k] / (h * h);
  out.hess2 = h11.squaredNorm() + 2.0 * h12.squaredNorm() + h22.squaredNorm() +
              2.0 * (m1.squaredNorm() + m2.squaredNorm()) + h33.squaredNorm();
  return out;
}

std::pair<std::vector<double>, std::vector<double>> gauss_legendre_unit(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre_unit: n must be positive");
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) J(k, k - 1) = J(k - 1, k) = k / std::sqrt(4.0 * k * k - 1.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(J);
  std::vector<double> x(n), w(n);
  for (int k = 0; k < n; ++k) {
    x[k] = 0.5 * eig.eigenvalues()(k);
    w[k] = eig.eigenvectors()(0, k) * eig.eigenvectors()(0, k);  // 2 v0^2 / 2
  }
  return {x, w};
}

RescaledEnergy rescaled_energy_3d(const MultiWellModel& model, const RecoveryFamily& family, double h, int n3) {
  if (!(h > 0.0)) throw std::invalid_argument("rescaled_energy_3d: h must be positive");
  if (n3 < 5) throw std::invalid_argument("rescaled_energy_3d: need at least 5 nodes across the thickness");
  const PenaltySchedule schedule = make_schedule(family.alpha(), model.p(), model.q());
  const RecoveryLayers L = family.layers(h);
  const auto [x3, w3] = gauss_legendre_unit(n3);
  const Eigen::VectorXd& w = family.grid().weights();
  double elastic = 0.0, penalty = 0.0;
  for (int k = 0; k < family.grid().size(); ++k) {
    if (w(k) == 0.0) continue;
    double ek = 0.0, pk = 0.0;
    for (int i = 0; i < n3; ++i) {
      const RescaledGradient d = rescaled_derivatives(L, k, x3[i], h);
      ek += w3[i] * model.density(d.F);
      pk += w3[i] * std::pow(d.hess2, 0.5 * schedule.p);
    }
    elastic += w(k) * ek;
    penalty += w(k) * pk;
  }
  const double scale = std::pow(h, -family.alpha());
  return {scale * elastic, scale * std::pow(schedule.eta(h), schedule.p) * penalty};
}

ConvergenceReport convergence_report(const MultiWellModel& model, const RecoveryFamily& family,
                                     const std::vector<double>& h_list, double limit_value, int n3,
                                     double gap_tolerance) {
  if (h_list.size() < 4) throw std::invalid_argument("convergence_report: need at least 4 values of h");
  for (std::size_t i = 1; i < h_list.size(); ++i)
    if (!(h_list[i] < h_list[i - 1])) throw std::invalid_argument("convergence_report: h_list must decrease");

  ConvergenceReport report;
  report.limit_value = limit_value;
  report.schedule = make_schedule(family.alpha(), model.p(), model.q());
  report.gap_tolerance = gap_tolerance;
  for (double h : h_list) {
    const RescaledEnergy e = rescaled_energy_3d(model, family, h, n3);
    ConvergenceRow row{h, e.elastic, e.penalty, std::abs(e.total() - limit_value), 0.0, std::nullopt};
    row.share = e.elastic > 0.0 ? e.penalty / e.elastic : (e.penalty > 0.0 ? INFINITY : 0.0);
    if (!report.rows.empty()) {
      const ConvergenceRow& prev = report.rows.back();
      if (prev.gap > 0.0 && row.gap > 0.0) row.order = std::log(row.gap / prev.gap) / std::log(h / prev.h);
    }
    report.rows.push_back(row);
  }

  const double scale = std::max(1.0, std::abs(limit_value));
  const double negligible = 1e-12 * scale;
  bool all_zero = true, decreasing = true, share_dec = true;
  std::vector<double> hs, gaps;
  for (std::size_t i = 0; i < report.rows.size(); ++i) {
    const ConvergenceRow& r = report.rows[i];
    all_zero = all_zero && r.gap <= negligible;
    if (r.gap > 0.0) {
      hs.push_back(r.h);
      gaps.push_back(r.gap);
    }
    if (i > 0) {
      decreasing = decreasing && r.gap < report.rows[i - 1].gap;
      share_dec = share_dec && r.share < report.rows[i - 1].share;
    }
  }
  report.gaps_decreasing = decreasing || all_zero;
  bool all_share_zero = true;
  for (const auto& r : report.rows) all_share_zero = all_share_zero && r.share == 0.0;
  report.share_decreasing = share_dec || all_share_zero;
  if (hs.size() >= 2) report.fitted_order = fit_loglog_slope(hs, gaps);
  report.final_share = report.rows.back().share;
  const double final_gap = report.rows.back().gap;
  report.final_relative_gap = limit_value != 0.0 ? final_gap / std::abs(limit_value) : final_gap;
  const bool gap_ok = limit_value != 0.0 ? report.final_relative_gap <= gap_tolerance : final_gap <= negligible;
  report.pass = report.gaps_decreasing && report.final_share < 0.05 && gap_ok;
  return report;
}

void ConvergenceReport::write_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << std::setprecision(17) << "h,elastic,penalty,gap,order\n";
  for (const auto& r : rows) {
    out << r.h << "," << r.elastic << "," << r.penalty << "," << r.gap << ",";
    if (r.order) out << *r.order;
    out << "\n";
  }
}

double midsurface_metric_residual(const RecoveryFamily& family, const Well& well, double h) {
  return metric_residual(family.layers(h).c0.grad, well).max;
}

}  // namespace mwplate
