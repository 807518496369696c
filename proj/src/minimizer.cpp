#include "mwplate/minimizer.hpp"

#include <functional>
#include <limits>
#include <optional>
#include <sstream>

namespace mwplate {

std::string to_string(LimitRegime regime) {
  switch (regime) {
    case LimitRegime::vk: return "vk";
    case LimitRegime::lvk: return "lvk";
    case LimitRegime::cvk_profile: return "cvk_profile";
    case LimitRegime::kl_profile: return "kl_profile";
  }
  return "unknown";
}

LimitRegime limit_regime_from_string(const std::string& name) {
  if (name == "vk") return LimitRegime::vk;
  if (name == "lvk") return LimitRegime::lvk;
  if (name == "cvk_profile") return LimitRegime::cvk_profile;
  if (name == "kl_profile") return LimitRegime::kl_profile;
  throw std::invalid_argument("unknown minimization regime '" + name +
                              "' (expected vk, lvk, cvk_profile or kl_profile)");
}

MinimizationProblem make_problem(LimitRegime regime, std::shared_ptr<const MultiWellModel> model,
                                 const LoadField& load, const OptimizerSettings& settings) {
  if (!model) throw std::invalid_argument("make_problem: null model");
  if (!load.mean_zero()) {
    std::ostringstream msg;
    msg << "make_problem: load resultant " << load.resultant().transpose()
        << " is not zero; the load problem is unbounded below";
    throw std::invalid_argument(msg.str());
  }
  const WellMaximization wm = maximize_over_wells(load, model->wells());
  return {regime, std::move(model), load, wm.lambda, wm.sets, settings};
}

DisplacementObjective::DisplacementObjective(const RelaxedForm& form, const LoadField& load, const Mat3& R,
                                             bool nonlinear)
    : form_(form), grid_(&load.grid()), n_(load.grid().size()), nonlinear_(nonlinear),
      c2_(form.well().normal_direction().squaredNorm()), w_(load.grid().weights()) {
  const MidplaneGrid& g = *grid_;
  D1_ = g.derivative_operator(0);
  D2_ = g.derivative_operator(1);
  D11_ = g.second_derivative_operator(0);
  D12_ = D1_ * D2_;
  D22_ = g.second_derivative_operator(1);
  const Vec3 d = R * form.well().normal_direction();
  force_.resize(n_);
  for (int k = 0; k < n_; ++k) force_(k) = w_(k) * load.f()[k].dot(d);

  Eigen::MatrixXd Bv(n_, 3), Bu = Eigen::MatrixXd::Zero(2 * n_, 3);
  for (int k = 0; k < n_; ++k) {
    const Vec2 x = g.point(k);
    Bv.row(k) << 1.0, x(0), x(1);
    Bu(k, 0) = 1.0;
    Bu(n_ + k, 1) = 1.0;
    Bu(k, 2) = -x(1);
    Bu(n_ + k, 2) = x(0);
  }
  gauge_v_ = Eigen::HouseholderQR<Eigen::MatrixXd>(Bv).householderQ() * Eigen::MatrixXd::Identity(n_, 3);
  gauge_u_ = Eigen::HouseholderQR<Eigen::MatrixXd>(Bu).householderQ() * Eigen::MatrixXd::Identity(2 * n_, 3);
}

double DisplacementObjective::value(const Eigen::VectorXd& x) const {
  Eigen::VectorXd g;
  return value_and_gradient(x, g);
}

double DisplacementObjective::value_and_gradient(const Eigen::VectorXd& x, Eigen::VectorXd& gradient) const {
  if (x.size() != size()) throw std::invalid_argument("DisplacementObjective: wrong unknown count");
  const Mat3& C = form_.coefficients();
  const double r2 = std::sqrt(2.0);
  const auto u1 = x.segment(0, n_), u2 = x.segment(n_, n_), v = x.segment(2 * n_, n_);
  const Eigen::VectorXd a11 = D1_ * u1, a12 = D2_ * u1, a21 = D1_ * u2, a22 = D2_ * u2;
  const Eigen::VectorXd p1 = D1_ * v, p2 = D2_ * v;
  const Eigen::VectorXd h11 = D11_ * v, h12 = D12_ * v, h22 = D22_ * v;
  const double c2 = nonlinear_ ? c2_ : 0.0;

  Eigen::VectorXd r11(n_), r12(n_), r22(n_), s11(n_), s12(n_), s22(n_);
  double energy = 0.0;
  for (int k = 0; k < n_; ++k) {
    const Vec3 dH(h11(k), h22(k), r2 * h12(k));
    const Vec3 gH = 2.0 * C * dH;
    const Vec3 dM(2.0 * a11(k) + c2 * p1(k) * p1(k), 2.0 * a22(k) + c2 * p2(k) * p2(k),
                  r2 * (a12(k) + a21(k) + c2 * p1(k) * p2(k)));
    const Vec3 gM = 2.0 * C * dM;
    energy += w_(k) * (dH.dot(C * dH) / 24.0 + dM.dot(C * dM) / 8.0);
    r11(k) = w_(k) * gH(0) / 24.0;
    r22(k) = w_(k) * gH(1) / 24.0;
    r12(k) = w_(k) * r2 * gH(2) / 24.0;
    s11(k) = w_(k) * gM(0) / 8.0;
    s22(k) = w_(k) * gM(1) / 8.0;
    s12(k) = w_(k) * r2 * gM(2) / 8.0;
  }
  energy -= force_.dot(v);

  gradient.resize(size());
  gradient.segment(0, n_) = D1_.transpose() * (2.0 * s11) + D2_.transpose() * s12;
  gradient.segment(n_, n_) = D2_.transpose() * (2.0 * s22) + D1_.transpose() * s12;
  Eigen::VectorXd gv = D11_.transpose() * r11 + D22_.transpose() * r22 + D12_.transpose() * r12 - force_;
  if (c2 != 0.0) {
    const Eigen::VectorXd e1 = c2 * (2.0 * s11.cwiseProduct(p1) + s12.cwiseProduct(p2));
    const Eigen::VectorXd e2 = c2 * (2.0 * s22.cwiseProduct(p2) + s12.cwiseProduct(p1));
    gv += D1_.transpose() * e1 + D2_.transpose() * e2;
  }
  gradient.segment(2 * n_, n_) = gv;
  return energy;
}

Eigen::VectorXd DisplacementObjective::project(const Eigen::VectorXd& x) const {
  Eigen::VectorXd y = x;
  auto u = y.segment(0, 2 * n_);
  u -= gauge_u_ * (gauge_u_.transpose() * u);
  auto v = y.segment(2 * n_, n_);
  v -= gauge_v_ * (gauge_v_.transpose() * v);
  return y;
}

double DisplacementObjective::gradient_norm(const Eigen::VectorXd& g) const {
  double acc = 0.0;
  for (int b = 0; b < 3; ++b)
    for (int k = 0; k < n_; ++k)
      if (w_(k) > 0.0) acc += g(b * n_ + k) * g(b * n_ + k) / w_(k);
  return std::sqrt(acc);
}

PlateState DisplacementObjective::state(const Eigen::VectorXd& x, GridPtr grid) const {
  std::vector<Vec2> u(n_);
  std::vector<double> v(n_);
  for (int k = 0; k < n_; ++k) {
    u[k] = Vec2(x(k), x(n_ + k));
    v[k] = x(2 * n_ + k);
  }
  return PlateState::from_samples(grid, form_.index(), Field<Vec2>(*grid, std::move(u)),
                                  Field<double>(*grid, std::move(v)));
}

namespace {

using ValueGradient = std::function<double(const Eigen::VectorXd&, Eigen::VectorXd&)>;
using Projector = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;
using Norm = std::function<double(const Eigen::VectorXd&)>;

DescentResult conjugate_gradient(const ValueGradient& fg, const Projector& project, const Norm& norm,
                                 const Eigen::VectorXd& x0, const OptimizerSettings& settings) {
  DescentResult out;
  Eigen::VectorXd x = project(x0), g, g_trial;
  double f = fg(x, g);
  Eigen::VectorXd gp = project(g);
  Eigen::VectorXd d = -gp;
  out.converged = false;
  for (int it = 0; it <= settings.max_iterations; ++it) {
    const double gnorm = norm(gp);
    out.trace.push_back({it, f, gnorm});
    if (!std::isfinite(f)) break;
    if (gnorm < settings.tolerance * (1.0 + std::abs(f))) {
      out.converged = true;
      break;
    }
    if (it == settings.max_iterations) break;
    double slope = gp.dot(d);
    if (!(slope < 0.0)) {
      d = -gp;
      slope = gp.dot(d);
    }
    // Step from the curvature along d, then Armijo backtracking.
    const double probe = 1e-6 * std::max(1.0, x.norm()) / d.norm();
    fg(x + probe * d, g_trial);
    const double curvature = (project(g_trial) - gp).dot(d) / probe;
    double step = curvature > 0.0 ? -slope / curvature : 1.0 / d.norm();
    bool accepted = false;
    Eigen::VectorXd x_new;
    double f_new = f;
    for (int k = 0; k < 60; ++k, step *= 0.5) {
      x_new = project(x + step * d);
      f_new = fg(x_new, g_trial);
      if (std::isfinite(f_new) && f_new <= f + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      if (d != -gp) {
        d = -gp;  // restart along the steepest descent direction
        continue;
      }
      break;
    }
    const Eigen::VectorXd gp_new = project(g_trial);
    const double beta = std::max(0.0, gp_new.dot(gp_new - gp) / gp.dot(gp));
    x = x_new;
    f = f_new;
    d = -gp_new + beta * d;
    gp = gp_new;
  }
  out.x = x;
  out.value = f;
  return out;
}

}  // namespace

DescentResult minimize_displacements(const DisplacementObjective& objective, const Eigen::VectorXd& x0,
                                     const OptimizerSettings& settings) {
  return conjugate_gradient(
      [&](const Eigen::VectorXd& x, Eigen::VectorXd& g) { return objective.value_and_gradient(x, g); },
      [&](const Eigen::VectorXd& x) { return objective.project(x); },
      [&](const Eigen::VectorXd& g) { return objective.gradient_norm(g); }, x0, settings);
}

std::vector<Eigen::VectorXd> rotation_grid(const RotationSet& set, int points_per_dimension) {
  const int m = static_cast<int>(set.tangent.cols());
  std::vector<Eigen::VectorXd> out;
  int total = 1;
  for (int i = 0; i < m; ++i) total *= points_per_dimension;
  const double pi = std::numbers::pi;
  for (int idx = 0; idx < total; ++idx) {
    Eigen::VectorXd theta(m);
    int rest = idx;
    for (int i = 0; i < m; ++i) {
      theta(i) = -pi + 2.0 * pi * (rest % points_per_dimension) / points_per_dimension;
      rest /= points_per_dimension;
    }
    out.push_back(theta);
  }
  return out;
}

namespace {

// J(direction angle, c_2..c_d) over polynomial profiles v = g(n . A x).
// p = (direction angle, c_2, ..., c_degree)
Profile profile_from(const Eigen::VectorXd& p, int degree) {
  std::vector<double> c(degree + 1, 0.0);
  for (int k = 2; k <= degree; ++k) c[k] = p(k - 1);
  return Profile::polynomial(c);
}

Vec2 direction_from(const Eigen::VectorXd& p) { return Vec2(std::cos(p(0)), std::sin(p(0))); }

struct ProfileObjective {
  const RelaxedForm& form;
  const LoadField& load;
  Vec3 d;
  int degree;

  double operator()(const Eigen::VectorXd& p) const {
    const MidplaneGrid& grid = load.grid();
    const Vec2 An = metric_square_root(form.well()) * direction_from(p);
    const Profile g = profile_from(p, degree);
    const double c = form.well().normal_direction().norm();
    const Mat2 nn = An * An.transpose();
    const Eigen::VectorXd& w = grid.weights();
    double acc = 0.0, slope = 0.0;
    for (int k = 0; k < grid.size(); ++k) {
      const double t = An.dot(grid.point(k));
      slope = std::max(slope, c * std::abs(g.derivative(1, t)));
      acc += w(k) * (form.relaxed_q(Mat2(g.derivative(2, t) * nn)) / 24.0 - load.f()[k].dot(d) * g(t));
    }
    return slope < 1.0 ? acc : std::numeric_limits<double>::infinity();
  }
};

/// E^KL(R y) - int f . R y over lifts y of the profile family.
struct KirchhoffProfileObjective {
  const RelaxedForm& form;
  const LoadField& load;
  Mat3 R;
  int degree;
  std::size_t well;

  std::optional<PlateState> state(const Eigen::VectorXd& p) const {
    try {
      const ProfileIsometry lift(profile_from(p, degree), direction_from(p), form.well(), load.grid());
      return PlateState::kirchhoff(load.grid_ptr(), well, lift.deformation());
    } catch (const std::domain_error&) {
      return std::nullopt;
    }
  }

  double operator()(const Eigen::VectorXd& p) const {
    const auto s = state(p);
    if (!s) return std::numeric_limits<double>::infinity();
    const Eigen::VectorXd& w = load.grid().weights();
    double work = 0.0;
    for (int k = 0; k < load.grid().size(); ++k) work += w(k) * load.f()[k].dot(R * s->deformation().y[k]);
    return energy_kl(*s, form) - work;
  }
};

DescentResult minimize_profile(const std::function<double(const Eigen::VectorXd&)>& J, int m,
                               const OptimizerSettings& settings) {
  auto fg = [&](const Eigen::VectorXd& p, Eigen::VectorXd& g) {
    const double f = J(p);
    g.resize(m);
    for (int i = 0; i < m; ++i) {
      Eigen::VectorXd a = p, b = p;
      const double step = 1e-6 * std::max(1.0, std::abs(p(i)));
      a(i) += step;
      b(i) -= step;
      g(i) = (J(a) - J(b)) / (2.0 * step);
    }
    return f;
  };
  OptimizerSettings s = settings;
  s.tolerance = std::max(settings.tolerance, 1e-7);
  Eigen::VectorXd p0 = Eigen::VectorXd::Zero(m);
  return conjugate_gradient(
      fg, [](const Eigen::VectorXd& p) { return p; }, [](const Eigen::VectorXd& g) { return g.norm(); }, p0, s);
}

}  // namespace

MinimizationResult minimize_regime(const MinimizationProblem& problem) {
  if (problem.lambda.empty()) throw std::invalid_argument("minimize_regime: empty Lambda");
  const MultiWellModel& model = *problem.model;
  const GridPtr grid = problem.load.grid_ptr();
  std::optional<MinimizationResult> best;
  std::vector<CellResult> cells;

  for (std::size_t j : problem.lambda) {
    const RelaxedForm form = relaxed_form(model, j);
    const RotationSet& set = problem.sets.at(j);
    const auto thetas = rotation_grid(set, problem.settings.rotation_grid);
    for (std::size_t idx = 0; idx < thetas.size(); ++idx) {
      const Mat3 R = set.point(thetas[idx]);
      DescentResult run;
      std::optional<PlateState> state;
      std::vector<double> params;
      const int degree = problem.settings.profile_degree;
      if (problem.regime == LimitRegime::cvk_profile) {
        const ProfileObjective J{form, problem.load, Vec3(R * form.well().normal_direction()), degree};
        run = minimize_profile(J, degree, problem.settings);
        if (run.converged) {
          const ProfileIsometry lift(profile_from(run.x, degree), direction_from(run.x), form.well(), *grid);
          state = PlateState::from_profile(grid, j, lift);
          params.assign(run.x.data(), run.x.data() + run.x.size());
        }
      } else if (problem.regime == LimitRegime::kl_profile) {
        const KirchhoffProfileObjective J{form, problem.load, R, degree, j};
        run = minimize_profile(J, degree, problem.settings);
        if (run.converged) {
          state = J.state(run.x);
          params.assign(run.x.data(), run.x.data() + run.x.size());
        }
      } else {
        const DisplacementObjective J(form, problem.load, R, problem.regime == LimitRegime::vk);
        run = minimize_displacements(J, Eigen::VectorXd::Zero(J.size()), problem.settings);
        if (run.converged) state = J.state(run.x, grid);
      }
      if (!run.converged) {
        std::ostringstream msg;
        msg << "minimize_regime: no convergence for well " << j + 1 << ", rotation cell " << idx << " after "
            << run.trace.size() - 1 << " iterations (gradient norm " << run.trace.back().gradient_norm << ")";
        throw MinimizationError(msg.str(), run.trace);
      }
      cells.push_back({j, static_cast<int>(idx), thetas[idx], R, run.value});
      if (!best || run.value < best->value) {
        best = MinimizationResult{j, *state, R, run.value, run.trace, {}, {}, params};
      }
    }
  }
  best->cells = cells;
  const double slack = 1e-8 * std::max(1.0, std::abs(best->value));
  for (const auto& c : cells)
    if (c.value - best->value <= slack) best->near_optimal.push_back(c);
  return *best;
}

WellComparison compare_wells(const MinimizationProblem& problem) {
  if (problem.model->size() < 2) throw std::invalid_argument("compare_wells: needs at least two wells");
  const MinimizationResult r = minimize_regime(problem);
  WellComparison out;
  out.cells = r.cells;
  out.best_per_well.assign(problem.model->size(), std::numeric_limits<double>::infinity());
  for (const auto& c : r.cells) out.best_per_well[c.well] = std::min(out.best_per_well[c.well], c.value);
  out.winner = r.well;
  return out;
}

}  // namespace mwplate
