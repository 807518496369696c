// Acceptance harness: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include "oracles.hpp"

#include "mwplate/minimizer.hpp"
#include "mwplate/sampling.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <sstream>

using namespace mwplate;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  double budget;  // seconds
  std::function<Outcome()> run;
};

GridPtr square(int n) { return std::make_shared<const MidplaneGrid>(MidplaneGrid::unit_square(n)); }

const Polynomial2 zero;
const Polynomial2 x1 = Polynomial2::graded({0, 1});
const Polynomial2 x1_squared = Polynomial2::graded({0, 0, 0, 1, 0, 0});
const std::vector<double> h_list = {0.1, 0.05, 0.025, 0.0125};

std::string fmt(double x) {
  std::ostringstream s;
  s.precision(12);
  s << x;
  return s.str();
}

std::string one_based(const std::vector<std::size_t>& lambda) {
  std::string s = "{";
  for (std::size_t i = 0; i < lambda.size(); ++i) s += (i ? "," : "") + std::to_string(lambda[i] + 1);
  return s + "}";
}

std::vector<Well> example2_wells() {
  Mat3 U2;
  U2 << 2, 0, 1, 0, 1, 0, 1, 0, 1;
  return {Well(Mat3(Vec3(4, 1, 1).asDiagonal())), Well(U2)};
}

LoadField example2_load(const GridPtr& g, double a, double b, double c) {
  return LoadField::from_polynomials(g, {Polynomial2::graded({0, a}), Polynomial2::graded({0, 0, b}),
                                         Polynomial2::graded({0, c})});
}

std::shared_ptr<const MultiWellModel> isotropic(double p = 4.0) {
  return std::make_shared<const MultiWellModel>(std::vector<Well>{Well(Mat3::Identity())},
                                                DensityKind::green_lagrange, 2.0, p);
}

double l2(const Field<Vec2>& u) {
  const Eigen::VectorXd& w = u.grid().weights();
  double acc = 0.0;
  for (int k = 0; k < u.size(); ++k) acc += w(k) * u[k].squaredNorm();
  return std::sqrt(acc);
}

double l2(const Field<double>& v) {
  const Eigen::VectorXd& w = v.grid().weights();
  double acc = 0.0;
  for (int k = 0; k < v.size(); ++k) acc += w(k) * v[k] * v[k];
  return std::sqrt(acc);
}

Outcome convergence(const MultiWellModel& model, const RecoveryFamily& family, double limit, double tolerance) {
  const ConvergenceReport r = convergence_report(model, family, h_list, limit, 5, tolerance);
  const bool ok = r.gaps_decreasing && r.share_decreasing && r.final_share < 0.05 &&
                  r.final_relative_gap < tolerance;
  std::ostringstream s;
  s << to_string(family.regime()) << " limit=" << fmt(limit) << " gaps";
  for (const auto& row : r.rows) s << " " << fmt(row.gap);
  s << " final_gap=" << fmt(r.final_relative_gap) << " final_share=" << fmt(r.final_share)
    << " gaps_decreasing=" << r.gaps_decreasing << " share_decreasing=" << r.share_decreasing;
  return {ok, s.str()};
}

Outcome example2_a() {
  const GridPtr g = square(11);
  const auto m = maximize_over_wells(example2_load(g, 1, 0, 0), example2_wells());
  Rng rng(42);
  const double brute = oracle::sampled_max(m.sets[1].moment, 100000, rng);
  const double v1 = m.sets[0].value, v2 = m.sets[1].value;
  const bool ok = std::abs(v1 - 1.0 / 3.0) < 1e-10 && std::abs(v2 - std::sqrt(5.0) / 12.0) < 1e-10 &&
                  std::abs(v2 - brute) < 1e-3 && m.lambda == std::vector<std::size_t>{0} && v2 <= 0.25 &&
                  0.25 < 1.0 / 3.0;
  return {ok, "well1=" + fmt(v1) + " well2=" + fmt(v2) + " sampled=" + fmt(brute) + " Lambda=" + one_based(m.lambda)};
}

Outcome example2_bc() {
  const GridPtr g = square(11);
  const auto m = maximize_over_wells(example2_load(g, 0, 1, 1), example2_wells());
  const double v1 = m.sets[0].value, v2 = m.sets[1].value;
  const bool ok = std::abs(v1 - 1.0 / 6.0) < 1e-10 && std::abs(v2 - (std::sqrt(5.0) + 1.0) / 12.0) < 1e-10 &&
                  m.lambda == std::vector<std::size_t>{1};
  return {ok, "well1=" + fmt(v1) + " (expected 1/6) well2=" + fmt(v2) + " Lambda=" + one_based(m.lambda) +
                  " (expected {2})"};
}

Outcome example1() {
  const GridPtr g = square(11);
  const std::vector<Well> wells = {Well(Mat3::Identity()), Well(Mat3(Vec3(1, 2, 1).asDiagonal()))};
  const double gamma = 1.5;
  bool ok = true;
  std::ostringstream s;
  for (double h : {0.1, 0.01}) {
    const double scale = std::pow(h, gamma + 1.0);
    const LoadField f = LoadField::from_polynomials(
        g, {zero, Polynomial2::graded({0, 0, scale * h}), Polynomial2::graded({0, scale})});
    const auto m = maximize_over_wells(f, wells);
    const double v1 = m.sets[0].value, v2 = m.sets[1].value;
    ok = ok && m.lambda == std::vector<std::size_t>{1} && m.sets[0].dimension == 0 && m.sets[1].dimension == 0 &&
         std::abs(v1 - (1 + h) * scale / 12.0) < 1e-9 * scale &&
         std::abs(v2 - (1 + 2 * h) * scale / 12.0) < 1e-9 * scale;
    s << "h=" << h << " Lambda_h=" << one_based(m.lambda) << " dims=" << m.sets[0].dimension << ","
      << m.sets[1].dimension << " F1=" << fmt(v1) << " F2=" << fmt(v2) << "; ";

    Mat3 printed;
    printed << 0, 0, 1, 0, 1, 0, 1, 0, 0;
    const MomentMatrix M1 = moment_matrix(f, wells[0]);
    ok = ok && std::abs(M1.evaluate(printed) - M1.evaluate(m.sets[0].representative)) < 1e-9 * scale &&
         std::abs(m.sets[0].representative.determinant() - 1.0) < 1e-12;
  }
  const auto lim = maximize_over_wells(LoadField::from_polynomials(g, {zero, zero, x1}), wells);
  ok = ok && lim.lambda == std::vector<std::size_t>{0, 1} && lim.sets[0].dimension == 1 && lim.sets[1].dimension == 1 &&
       std::abs(lim.sets[0].value - 1.0 / 12.0) < 1e-9 && std::abs(lim.sets[1].value - 1.0 / 12.0) < 1e-9;
  s << "limit Lambda=" << one_based(lim.lambda) << " dims=" << lim.sets[0].dimension << "," << lim.sets[1].dimension
    << " (printed maximizer has det -1; SO(3) maximizer used)";
  return {ok, s.str()};
}

Outcome rank_one() {
  const auto wells = example2_wells();
  const auto c = rank_one_connected(wells[0], wells[1]);
  return {std::abs(c.middle_eigenvalue - 1.0) < 1e-12, "middle eigenvalue=" + fmt(c.middle_eigenvalue)};
}

Outcome nu_lemma() {
  Rng rng(2024);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const MidplaneGrid g = MidplaneGrid::unit_square(41);
  double worst = 0.0, min_det = std::numeric_limits<double>::infinity();
  for (int trial = 0; trial < 10; ++trial) {
    const Well U(random_spd(rng, 0.7, 1.4));
    const Vec2 n = Vec2(u(rng), u(rng)).normalized();
    const Profile p = Profile::polynomial({0.0, 0.0, 0.3 * u(rng), 0.2 * u(rng)});
    const ProfileIsometry lift(p, n, U, g);
    const Mat3 U2 = U.matrix() * U.matrix();
    for (int k = 0; k < g.size(); ++k) {
      Mat3 F;
      F << lift.deformation().grad[k], lift.nu()[k];
      worst = std::max(worst, (F.transpose() * F - U2).cwiseAbs().maxCoeff());
      min_det = std::min(min_det, F.determinant());
    }
  }
  return {worst < 1e-9 && min_det > 0.0, "max residual=" + fmt(worst) + " min det=" + fmt(min_det)};
}

Outcome quadratic_forms() {
  Rng rng(6);
  const auto wells = example2_wells();
  const MultiWellModel model(wells, DensityKind::green_lagrange);
  double fd_err = 0.0, sym_err = 0.0, min_lambda = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < wells.size(); ++j) {
    const QuadraticForm3 Q = hessian_Q(model, j);
    for (int k = 0; k < 10; ++k) {
      const Mat3 A = random_matrix(rng);
      const double fd = oracle::directional_second_derivative(model, wells[j].matrix(), A);
      fd_err = std::max(fd_err, std::abs(Q(A) - fd) / std::max(1.0, std::abs(fd)));
    }
    for (int k = 0; k < 100; ++k) {
      const Mat3 A = random_matrix(rng);
      sym_err = std::max(sym_err, std::abs(Q(A) - Q(Mat3(wells[j].inverse() * sym(Mat3(wells[j].matrix() * A))))));
    }
    min_lambda = std::min(min_lambda, coercivity_constant(Q, wells[j]));
  }

  double grid_err = 0.0;
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int k = 0; k < 20; ++k) {
    const Well U = k < 10 ? wells[k % 2] : Well(random_spd(rng, 0.7, 1.5));
    const QuadraticForm3 Q = green_lagrange_form(U);
    const RelaxedForm form(Q, U);
    Mat2 D;
    D << u(rng), u(rng), 0.0, u(rng);
    D(1, 0) = D(0, 1);
    D /= D.norm();
    const auto grid = oracle::relaxed_by_grid(Q, U, D);
    grid_err = std::max(grid_err, std::abs(form.relaxed_q(D) - grid.value) / grid.value);
  }

  const Well I(Mat3::Identity());
  const RelaxedForm iso(green_lagrange_form(I), I);
  double iso_err = 0.0;
  for (int k = 0; k < 20; ++k) {
    Mat2 D;
    D << u(rng), u(rng), 0.0, u(rng);
    D(1, 0) = D(0, 1);
    iso_err = std::max(iso_err, std::abs(iso.relaxed_q(D) - 2.0 * D.squaredNorm()));
  }
  const bool ok = fd_err < 1e-6 && sym_err < 1e-8 && min_lambda > 0.0 && grid_err < 1e-5 && iso_err < 1e-12;
  return {ok, "fd=" + fmt(fd_err) + " symmetry=" + fmt(sym_err) + " coercivity=" + fmt(min_lambda) +
                  " grid=" + fmt(grid_err) + " isotropic=" + fmt(iso_err)};
}

Outcome lvk_convergence() {
  const auto model = isotropic();
  const GridPtr g = square(101);
  const PlateState s = PlateState::from_polynomials(g, 0, zero, zero, x1_squared);
  const RecoveryFamily family = build_recovery(s, relaxed_form(*model, 0), Regime::lvk, 5.0);
  return convergence(*model, family, 1.0 / 3.0, 0.05);
}

Outcome hierarchy_convergence() {
  const GridPtr g = square(101);
  const auto model = isotropic();
  const RelaxedForm form = relaxed_form(*model, 0);
  // Each regime has its own 60 s budget.
  auto timed = [](const std::function<Outcome()>& fn) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out = fn();
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    out.pass = out.pass && seconds < 60.0;
    out.detail += " time=" + fmt(seconds) + "s";
    return out;
  };

  const PlateState pair = PlateState::from_polynomials(g, 0, Polynomial2({{3, 0, -2.0 / 3.0}}), zero, x1_squared);
  const Outcome vk =
      timed([&] { return convergence(*model, build_recovery(pair, form, Regime::vk, 4.0), 1.0 / 3.0, 0.05); });

  const ProfileIsometry lift(Profile::cosine(2.0), Vec2(1, 0), model->well(0), *g);
  // (1/24) int 2 g''^2 with g'' = -cos(x1 / 2) / 2
  const double cvk_limit = (0.5 + std::sin(0.5)) / 48.0;
  const Outcome cvk = timed([&] {
    return convergence(*model, build_recovery(PlateState::from_profile(g, 0, lift), form, Regime::cvk, 3.0), cvk_limit,
                       0.05);
  });

  const auto stiff = isotropic(10.0);
  const Outcome kl = timed([&] {
    const PlateState cylinder = PlateState::kirchhoff(g, 0, lift.deformation());
    return convergence(*stiff, build_recovery(cylinder, relaxed_form(*stiff, 0), Regime::kirchhoff, 2.0), 1.0 / 48.0,
                       0.10);
  });

  return {vk.pass && cvk.pass && kl.pass, vk.detail + " | " + cvk.detail + " | " + kl.detail};
}

Outcome frame_indifference() {
  const auto model = isotropic();
  const GridPtr g = square(41);
  const RelaxedForm form = relaxed_form(*model, 0);
  const ProfileIsometry lift(Profile::cosine(2.0), Vec2(1, 0), model->well(0), *g);
  const std::vector<RecoveryFamily> families = {
      build_recovery(PlateState::kirchhoff(g, 0, lift.deformation()), form, Regime::kirchhoff, 2.0),
      build_recovery(PlateState::from_profile(g, 0, lift), form, Regime::cvk, 3.0),
      build_recovery(PlateState::from_polynomials(g, 0, Polynomial2::graded({0, 0.1, 0.2}), zero, x1_squared), form,
                     Regime::vk, 4.0),
      build_recovery(PlateState::from_polynomials(g, 0, zero, Polynomial2::graded({0, 0.3}), x1_squared), form,
                     Regime::lvk, 5.0)};
  Rng rng(9);
  double worst = 0.0;
  for (const auto& family : families) {
    const Mat3 R = random_rotation(rng);
    for (double h : {0.1, 0.025}) {
      const auto a = rescaled_energy_3d(*model, family, h);
      const auto b = rescaled_energy_3d(*model, family.rotated(R), h);
      worst = std::max(worst, std::abs(a.elastic - b.elastic) / a.elastic);
      worst = std::max(worst, std::abs(a.penalty - b.penalty) / a.penalty);
    }
  }
  return {worst < 1e-10, "max relative change=" + fmt(worst)};
}

Outcome minimizer() {
  const auto model = isotropic();
  OptimizerSettings settings;
  settings.rotation_grid = 2;
  const GridPtr g = square(21);
  std::ostringstream s;

  const auto z = minimize_regime(make_problem(LimitRegime::lvk, model, LoadField::zero(g), settings));
  const bool zero_ok = l2(z.state.u()) < 1e-8 && l2(z.state.v()) < 1e-8;
  s << "zero load |u|=" << fmt(l2(z.state.u())) << " |v|=" << fmt(l2(z.state.v()));

  const LoadField f = LoadField::from_polynomials(g, {zero, zero, Polynomial2::graded({-1.0 / 12.0, 0, 0, 1})});
  const auto r = minimize_regime(make_problem(LimitRegime::lvk, model, f, settings));
  const bool u_ok = l2(r.state.u()) < 1e-6 * (1.0 + l2(r.state.v()));
  bool monotone = true;
  for (std::size_t i = 1; i < r.trace.size(); ++i) monotone = monotone && r.trace[i].value <= r.trace[i - 1].value;
  s << "; loaded |u|=" << fmt(l2(r.state.u())) << " |v|=" << fmt(l2(r.state.v())) << " value=" << fmt(r.value)
    << " monotone=" << monotone;

  Rng rng(10);
  const RelaxedForm form = relaxed_form(*model, 0);
  const DisplacementObjective J(form, f, random_rotation(rng), true);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  Eigen::VectorXd x(J.size()), grad;
  for (int i = 0; i < x.size(); ++i) x(i) = u(rng);
  J.value_and_gradient(x, grad);
  std::uniform_int_distribution<int> pick(0, J.size() - 1);
  double grad_err = 0.0;
  for (int m = 0; m < 20; ++m) {
    const int i = pick(rng);
    Eigen::VectorXd a = x, b = x;
    a(i) += 1e-6;
    b(i) -= 1e-6;
    const double fd = (J.value(a) - J.value(b)) / 2e-6;
    grad_err = std::max(grad_err, std::abs(grad(i) - fd) / std::max(1.0, std::abs(fd)));
  }
  s << "; gradient fd error=" << fmt(grad_err);

  const LoadField tilted = LoadField::from_polynomials(g, {zero, Polynomial2::graded({0, 0, 0.5}), x1});
  const auto problem = make_problem(LimitRegime::lvk, model, tilted, settings);
  const auto t = minimize_regime(problem);
  std::normal_distribution<double> n(0.0, 1.0);
  const double base = assemble_limit_objective(t.state, tilted, problem.sets[t.well], t.R, Vec3::Zero(), Regime::lvk, form);
  bool dominance = true;
  for (int k = 0; k < 50; ++k) {
    const double beta = k % 2 ? 0.5 : 0.1;
    const auto& normal = problem.sets[t.well].normal;
    const Vec3 w = beta * Vec3(normal * (normal.transpose() * Vec3(n(rng), n(rng), n(rng)))).normalized();
    dominance = dominance &&
                base <= assemble_limit_objective(t.state, tilted, problem.sets[t.well], t.R, w, Regime::lvk, form) + 1e-14;
  }
  s << "; W=0 dominance=" << dominance;
  return {zero_ok && u_ok && monotone && grad_err < 1e-5 && dominance, s.str()};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "Example 2 (a,b,c)=(1,0,0)", 5, example2_a},
      {2, "Example 2 (a,b,c)=(0,1,1)", 5, example2_bc},
      {3, "Example 1 optimal rotations", 5, example1},
      {4, "rank-one connectivity", 1, rank_one},
      {5, "normal-vector lemma on profile lifts", 10, nu_lemma},
      {6, "quadratic-form suite", 30, quadratic_forms},
      {7, "recovery convergence alpha=5", 60, lvk_convergence},
      {8, "recovery convergence alpha=4,3,2", 180, hierarchy_convergence},
      {9, "frame indifference of recovery families", 10, frame_indifference},
      {10, "minimizer suite", 120, minimizer},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool pass = out.pass && seconds < c.budget;
    failures += !pass;
    std::printf("[%s] criterion %d: %s (%.2f s, budget %.0f s) %s\n", pass ? "PASS" : "FAIL", c.id, c.name.c_str(),
                seconds, c.budget, out.detail.c_str());
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
