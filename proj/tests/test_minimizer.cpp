#include "doctest.h"

#include "mwplate/minimizer.hpp"
#include "mwplate/sampling.hpp"

using namespace mwplate;

namespace {

GridPtr square(int n) { return std::make_shared<const MidplaneGrid>(MidplaneGrid::unit_square(n)); }

const Polynomial2 zero;

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

std::shared_ptr<const MultiWellModel> isotropic() {
  return std::make_shared<const MultiWellModel>(std::vector<Well>{Well(Mat3::Identity())},
                                                DensityKind::green_lagrange);
}

// f = (x1^2 - 1/12) e3: no first moments, so every rotation is optimal.
LoadField bump(const GridPtr& g, double scale = 1.0) {
  return LoadField::from_polynomials(g, {zero, zero, Polynomial2::graded({-scale / 12.0, 0, 0, scale})});
}

OptimizerSettings coarse() {
  OptimizerSettings s;
  s.rotation_grid = 2;
  return s;
}

}  // namespace

TEST_SUITE("limit_minimizer") {

TEST_CASE("zero load gives the zero state") {
  const GridPtr g = square(15);
  const auto problem = make_problem(LimitRegime::lvk, isotropic(), LoadField::zero(g), coarse());
  const auto r = minimize_regime(problem);
  CHECK(r.value == doctest::Approx(0.0));
  CHECK(l2(r.state.u()) < 1e-8);
  CHECK(l2(r.state.v()) < 1e-8);
}

TEST_CASE("linearized problem with a load") {
  const GridPtr g = square(21);
  const auto problem = make_problem(LimitRegime::lvk, isotropic(), bump(g), coarse());
  const auto r = minimize_regime(problem);
  CHECK(r.value < 0.0);
  CHECK(l2(r.state.u()) < 1e-6 * (1.0 + l2(r.state.v())));
  CHECK(l2(r.state.v()) > 1e-6);
  for (std::size_t i = 1; i < r.trace.size(); ++i) CHECK(r.trace[i].value <= r.trace[i - 1].value);
  CHECK(r.trace.back().gradient_norm <= problem.settings.tolerance * (1.0 + std::abs(r.value)));
  CHECK_FALSE(r.near_optimal.empty());
}

TEST_CASE("analytic gradient against finite differences") {
  const GridPtr g = square(11);
  const RelaxedForm form(green_lagrange_form(Well(Mat3::Identity())), Well(Mat3::Identity()));
  Rng rng(6);
  for (bool nonlinear : {false, true}) {
    const DisplacementObjective J(form, bump(g), random_rotation(rng), nonlinear);
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    Eigen::VectorXd x(J.size());
    for (int i = 0; i < x.size(); ++i) x(i) = u(rng);
    Eigen::VectorXd grad;
    J.value_and_gradient(x, grad);
    std::uniform_int_distribution<int> pick(0, J.size() - 1);
    for (int m = 0; m < 20; ++m) {
      const int i = pick(rng);
      const double t = 1e-6;
      Eigen::VectorXd a = x, b = x;
      a(i) += t;
      b(i) -= t;
      const double fd = (J.value(a) - J.value(b)) / (2 * t);
      CHECK(std::abs(grad(i) - fd) <= 1e-5 * std::max(1.0, std::abs(fd)));
    }
  }
}

TEST_CASE("small loads: von Karman and linearized values agree") {
  const GridPtr g = square(21);
  const double eps = 1e-3;
  const auto vk = minimize_regime(make_problem(LimitRegime::vk, isotropic(), bump(g, eps), coarse()));
  const auto lvk = minimize_regime(make_problem(LimitRegime::lvk, isotropic(), bump(g, eps), coarse()));
  REQUIRE(lvk.value < 0.0);
  CHECK(std::abs(vk.value - lvk.value) <= 0.05 * std::abs(lvk.value));
}

TEST_CASE("comparison of symmetric wells") {
  const GridPtr g = square(15);
  const auto model = std::make_shared<const MultiWellModel>(
      std::vector<Well>{Well(Mat3(Vec3(1, 2, 1).asDiagonal())), Well(Mat3(Vec3(2, 1, 1).asDiagonal()))},
      DensityKind::green_lagrange);
  const LoadField f = LoadField::from_polynomials(g, {zero, zero, Polynomial2::graded({-1.0 / 6.0, 0, 0, 1, 0, 1})});
  const auto problem = make_problem(LimitRegime::lvk, model, f, coarse());
  REQUIRE(problem.lambda.size() == 2);
  const auto cmp = compare_wells(problem);
  CHECK(std::abs(cmp.best_per_well[0] - cmp.best_per_well[1]) <= 1e-8 * std::abs(cmp.best_per_well[0]));
  CHECK_THROWS_AS(compare_wells(make_problem(LimitRegime::lvk, isotropic(), f, coarse())), std::invalid_argument);
}

TEST_CASE("the zero fluctuation dominates") {
  const GridPtr g = square(15);
  const auto model = isotropic();
  const RelaxedForm form = relaxed_form(*model, 0);
  const LoadField f = LoadField::from_polynomials(g, {zero, Polynomial2::graded({0, 0, 1}), Polynomial2::graded({0, 1})});
  const auto problem = make_problem(LimitRegime::lvk, model, f, coarse());
  const auto r = minimize_regime(problem);
  const RotationSet& set = problem.sets[r.well];
  Rng rng(50);
  std::normal_distribution<double> n(0.0, 1.0);
  for (double beta : {0.1, 0.5}) {
    const double base = assemble_limit_objective(r.state, f, set, r.R, Vec3::Zero(), Regime::lvk, form);
    for (int k = 0; k < 50; ++k) {
      const Vec3 w = beta * Vec3(set.normal * (set.normal.transpose() * Vec3(n(rng), n(rng), n(rng)))).normalized();
      CHECK(base <= assemble_limit_objective(r.state, f, set, r.R, w, Regime::lvk, form) + 1e-14);
    }
  }
}

TEST_CASE("profile regimes") {
  const GridPtr g = square(21);
  OptimizerSettings settings = coarse();
  settings.rotation_grid = 1;
  settings.profile_degree = 3;
  for (auto regime : {LimitRegime::cvk_profile, LimitRegime::kl_profile}) {
    const auto flat = minimize_regime(make_problem(regime, isotropic(), LoadField::zero(g), settings));
    CHECK(flat.value == doctest::Approx(0.0));
    const auto loaded = minimize_regime(make_problem(regime, isotropic(), bump(g, 0.1), settings));
    CHECK(loaded.value < 0.0);
    CHECK(loaded.profile_parameters.size() == 3);
  }
  const auto kl = minimize_regime(make_problem(LimitRegime::kl_profile, isotropic(), bump(g, 0.1), settings));
  CHECK(metric_residual(kl.state.deformation().grad, Well(Mat3::Identity()), 1).max < 1e-8);
  CHECK(limit_regime_from_string("kl_profile") == LimitRegime::kl_profile);
  CHECK_THROWS_AS(limit_regime_from_string("kl"), std::invalid_argument);
}

TEST_CASE("Example 2 loads select the well") {
  const GridPtr g = square(15);
  Mat3 U2;
  U2 << 2, 0, 1, 0, 1, 0, 1, 0, 1;
  const auto model = std::make_shared<const MultiWellModel>(
      std::vector<Well>{Well(Mat3(Vec3(4, 1, 1).asDiagonal())), Well(U2)}, DensityKind::green_lagrange);
  auto load = [&](double a, double b, double c) {
    return LoadField::from_polynomials(g, {Polynomial2::graded({0, a}), Polynomial2::graded({0, 0, b}),
                                           Polynomial2::graded({0, c})});
  };
  // Procrustes values: (1, 0, 0) gives 1/3 against sqrt(5)/12; (0, 1, 1) gives 5/12 against (sqrt(5) + 1)/12.
  for (const auto& f : {load(1, 0, 0), load(0, 1, 1)}) {
    const auto cmp = compare_wells(make_problem(LimitRegime::lvk, model, f, coarse()));
    CHECK(cmp.winner == 0);
    CHECK(std::isinf(cmp.best_per_well[1]));
    for (const auto& c : cmp.cells) CHECK(c.well == 0);
  }
}

TEST_CASE("small load along x1 e3") {
  // Every optimal rotation turns the force tangential, so both regimes return the ground state.
  const GridPtr g = square(15);
  const LoadField f = LoadField::from_polynomials(g, {zero, zero, Polynomial2::graded({0, 1e-3})});
  const auto vk = minimize_regime(make_problem(LimitRegime::vk, isotropic(), f, coarse()));
  const auto lvk = minimize_regime(make_problem(LimitRegime::lvk, isotropic(), f, coarse()));
  CHECK(std::abs(vk.value - lvk.value) <= 0.05 * std::abs(lvk.value) + 1e-15);
}

TEST_CASE("empty Lambda is rejected") {
  const GridPtr g = square(11);
  auto problem = make_problem(LimitRegime::lvk, isotropic(), LoadField::zero(g), coarse());
  problem.lambda.clear();
  CHECK_THROWS_AS(minimize_regime(problem), std::invalid_argument);
}

}  // TEST_SUITE
