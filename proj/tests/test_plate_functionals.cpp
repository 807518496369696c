#include "doctest.h"

#include "mwplate/plate_functionals.hpp"

using namespace mwplate;

namespace {

GridPtr square(int n) { return std::make_shared<const MidplaneGrid>(MidplaneGrid::unit_square(n)); }

RelaxedForm isotropic() {
  const Well I(Mat3::Identity());
  return RelaxedForm(green_lagrange_form(I), I);
}

const Polynomial2 zero;
const Polynomial2 x1_squared = Polynomial2::graded({0, 0, 0, 1, 0, 0});
// u1 = -(2/3) x1^3 makes grad u^T + grad u = -grad v (x) grad v for v = x1^2.
const Polynomial2 compatible_u1({{3, 0, -2.0 / 3.0}});

PlateState cylinder_state(int n, double radius) {
  const GridPtr g = square(n);
  const Well I(Mat3::Identity());
  const ProfileIsometry lift(Profile::cosine(radius), Vec2(1, 0), I, *g);
  return PlateState::kirchhoff(g, 0, lift.deformation());
}

}  // namespace

TEST_SUITE("plate_functionals") {

TEST_CASE("ground state") {
  const RelaxedForm form = isotropic();
  const PlateState s = PlateState::zero(square(11), 0);
  CHECK(energy_lvk(s, form) == 0.0);
  CHECK(energy_vk(s, form) == 0.0);
  CHECK(energy_cvk(s, form) == 0.0);
  CHECK(constraint_residual(s, form.well()) == 0.0);

  const GridPtr g = square(11);
  const ProfileIsometry flat(Profile::polynomial({0.0}), Vec2(1, 0), form.well(), *g);
  CHECK(std::abs(energy_kl(PlateState::kirchhoff(g, 0, flat.deformation()), form)) < 1e-20);
}

TEST_CASE("kirchhoff energy of a cylinder") {
  const RelaxedForm form = isotropic();
  const double e2 = energy_kl(cylinder_state(201, 2.0), form);
  CHECK(std::abs(e2 - 1.0 / 48.0) < 0.02 / 48.0);
  const double e4 = energy_kl(cylinder_state(201, 4.0), form);
  CHECK(std::abs(e4 / e2 - 0.25) < 0.02 * 0.25);
  CHECK_THROWS_AS(energy_kl(PlateState::zero(square(11), 0), form), std::invalid_argument);
}

TEST_CASE("von Karman functionals on closed forms") {
  const RelaxedForm form = isotropic();
  const GridPtr g = square(101);
  const PlateState compatible = PlateState::from_polynomials(g, 0, compatible_u1, zero, x1_squared);
  CHECK(constraint_residual(compatible, form.well()) < 1e-8);
  CHECK(std::abs(energy_vk(compatible, form) - 1.0 / 3.0) < 1e-10);
  CHECK(membrane_energy(compatible, form, true) < 1e-12);
  CHECK(std::abs(energy_cvk(compatible, form) - energy_vk(compatible, form)) < 1e-10);

  const PlateState bent = PlateState::from_polynomials(g, 0, zero, zero, x1_squared);
  CHECK(std::abs(energy_lvk(bent, form) - 1.0 / 3.0) < 1e-10);
  // (1/8) int 2 |grad v (x) grad v|^2 = 4 int x1^4 = 1/20 in the limit of fine grids.
  const double vk = energy_vk(bent, form);
  CHECK(vk > energy_lvk(bent, form));
  CHECK(std::abs(vk - (1.0 / 3.0 + 1.0 / 20.0)) < 1e-4);
  CHECK(std::abs(constraint_residual(bent, form.well()) - 1.0) < 1e-12);
  try {
    energy_cvk(bent, form);
    FAIL("expected ConstraintError");
  } catch (const ConstraintError& e) {
    CHECK(e.residual() == doctest::Approx(1.0));
  }
}

TEST_CASE("scaling and refinement") {
  const RelaxedForm form = isotropic();
  const Polynomial2 v = Polynomial2::graded({0, 0.2, 0, 0.5, 0.3, -0.4, 0.1});
  const GridPtr g = square(41);
  const PlateState s = PlateState::from_polynomials(g, 0, zero, zero, v);
  const double b = bending_energy(s, form);
  const double tb = bending_energy(s.with_scaled_v(2.5), form);
  CHECK(std::abs(tb - 6.25 * b) <= 1e-10 * tb);

  auto sampled_energy = [&](int n) {
    const GridPtr gn = square(n);
    const auto u = Field<Vec2>::sample(*gn, [](const Vec2& x) { return Vec2(0.1 * std::sin(x(1)), 0.0); });
    const auto w = Field<double>::sample(*gn, [](const Vec2& x) { return std::sin(x(0)) * std::cos(2 * x(1)); });
    return energy_vk(PlateState::from_samples(gn, 0, u, w), form);
  };
  const double e1 = sampled_energy(81), e2 = sampled_energy(161), e3 = sampled_energy(321);
  const double slope = std::log2(std::abs(e1 - e2) / std::abs(e2 - e3));
  CHECK(slope >= 1.8);
}

TEST_CASE("force work") {
  const RelaxedForm form = isotropic();
  const GridPtr g = square(101);
  const Polynomial2 x1 = Polynomial2::graded({0, 1});
  const LoadField f = LoadField::from_polynomials(g, {zero, zero, x1});
  CHECK(f.mean_zero());
  const PlateState s = PlateState::from_polynomials(g, 0, zero, zero, x1);
  const double w = force_work(s, f, Mat3::Identity(), form.well());
  // Trapezoid error of int x1^2 is h^2 / 6.
  CHECK(std::abs(w - 1.0 / 12.0) < 0.01 * 0.01 / 6.0 + 1e-14);
  const Mat3 flip = Vec3(1, -1, -1).asDiagonal();
  CHECK(force_work(s, f, flip, form.well()) == doctest::Approx(-w).epsilon(1e-14));
  CHECK(force_work(PlateState::zero(g, 0), f, Mat3::Identity(), form.well()) == 0.0);
  CHECK_FALSE(LoadField::from_polynomials(g, {zero, zero, Polynomial2::graded({1.0})}).mean_zero());
}

TEST_CASE("field serialization round trip") {
  const GridPtr g = square(7);
  const auto f = Field<Vec3>::sample(*g, [](const Vec2& x) { return Vec3(x(0), x(1) * x(1), 0.1 / 3.0); });
  const std::string path = "plate_functionals_roundtrip.csv";
  write_field_csv(path, f, "f");
  const Field<Vec3> back = read_vector_csv(path, *g);
  for (int k = 0; k < g->size(); ++k) CHECK((back[k] - f[k]).norm() == 0.0);
  std::remove(path.c_str());
}

}  // TEST_SUITE
