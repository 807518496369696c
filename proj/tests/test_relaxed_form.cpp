#include "doctest.h"
#include "oracles.hpp"

#include "mwplate/relaxed_form.hpp"

using namespace mwplate;

namespace {

Mat2 random_sym2(Rng& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Mat2 D;
  D << u(rng), u(rng), 0.0, u(rng);
  D(1, 0) = D(0, 1);
  return D;
}

Eigen::Matrix<double, 6, 6> random_stiffness(Rng& rng) {
  std::uniform_real_distribution<double> u(-0.3, 0.3);
  Eigen::Matrix<double, 6, 6> B;
  for (int i = 0; i < 6; ++i)
    for (int k = 0; k < 6; ++k) B(i, k) = u(rng);
  return B * B.transpose() + Eigen::Matrix<double, 6, 6>::Identity();
}

}  // namespace

TEST_SUITE("relaxed_form") {

TEST_CASE("isotropic well") {
  Rng rng(1);
  const Well I(Mat3::Identity());
  const RelaxedForm form(green_lagrange_form(I), I);
  for (int k = 0; k < 20; ++k) {
    const Mat2 D = random_sym2(rng);
    CHECK(form.l_operator(D).norm() < 1e-14);
    CHECK(std::abs(form.relaxed_q(D) - 2.0 * D.squaredNorm()) < 1e-12);
  }
  CHECK(form.relaxed_q(Mat2::Zero()) == 0.0);
  CHECK(form.l_operator(Mat2::Zero()).norm() == 0.0);
  CHECK((form.coefficients() - 2.0 * Mat3::Identity()).norm() < 1e-12);
}

TEST_CASE("completion vector against a grid search") {
  const Well U(Mat3(Vec3(1, 1, 2).asDiagonal()));
  const QuadraticForm3 Q = green_lagrange_form(U);
  const RelaxedForm form(Q, U);
  Mat2 D = Mat2::Zero();
  D(0, 0) = 1.0;
  const auto grid = oracle::relaxed_by_grid(Q, U, D);
  CHECK((form.l_operator(D) - grid.argmin).cwiseAbs().maxCoeff() < 2e-3);
  CHECK(std::abs(form.relaxed_q(D) - grid.value) <= 1e-5 * std::max(1.0, grid.value));
}

TEST_CASE("random anisotropic forms against a grid search") {
  Rng rng(99);
  for (int k = 0; k < 4; ++k) {
    const Well U(random_spd(rng, 0.7, 1.5));
    const QuadraticForm3 Q = anisotropic_form(U, random_stiffness(rng));
    const RelaxedForm form(Q, U);
    for (int m = 0; m < 5; ++m) {
      Mat2 D = random_sym2(rng);
      D /= D.norm();
      const auto grid = oracle::relaxed_by_grid(Q, U, D);
      CHECK(std::abs(form.relaxed_q(D) - grid.value) <= 1e-5 * grid.value);
      CHECK(form.relaxed_q(D) <= grid.value + 1e-12);
    }
  }
}

TEST_CASE("structural properties") {
  Rng rng(5);
  Mat3 U2;
  U2 << 2, 0, 1, 0, 1, 0, 1, 0, 1;
  const Well U(U2);
  const QuadraticForm3 Q = green_lagrange_form(U);
  const RelaxedForm form(Q, U);
  for (int k = 0; k < 100; ++k) {
    const Mat2 D1 = random_sym2(rng), D2 = random_sym2(rng);
    const double a = 0.7, b = -1.3;
    CHECK(form.stationarity_residual(D1, form.l_operator(D1)).norm() < 1e-10);
    CHECK((form.l_operator(Mat2(a * D1 + b * D2)) - a * form.l_operator(D1) - b * form.l_operator(D2)).norm() < 1e-10);
    CHECK(std::abs(form.relaxed_q(Mat2(3.0 * D1)) - 9.0 * form.relaxed_q(D1)) <= 1e-10 * form.relaxed_q(D1));
    CHECK(form.relaxed_q(D1) <= Q(Mat3(U.inverse() * embed<double>(D1))) + 1e-12);
    const Mat3 full = U.inverse() * (embed<double>(D1) + transverse_completion(form.l_operator(D1)));
    CHECK(std::abs(form.relaxed_q(D1) - Q(full)) < 1e-10);
    const double lhs = form.relaxed_q(Mat2(D1 + D2)) + form.relaxed_q(Mat2(D1 - D2));
    const double rhs = 2.0 * form.relaxed_q(D1) + 2.0 * form.relaxed_q(D2);
    CHECK(std::abs(lhs - rhs) < 1e-9);
    CHECK(form.relaxed_q(D1) >= 0.0);
  }
  Eigen::SelfAdjointEigenSolver<Mat3> eig(form.coefficients());
  CHECK(eig.eigenvalues().minCoeff() > 0.0);
}

TEST_CASE("gradient of the relaxed form") {
  Rng rng(8);
  const Well U(random_spd(rng));
  const RelaxedForm form(green_lagrange_form(U), U);
  const Mat2 D = random_sym2(rng);
  const Mat2 G = form.gradient(D);
  const double t = 1e-6;
  for (int i = 0; i < 2; ++i)
    for (int k = 0; k < 2; ++k) {
      Mat2 E = Mat2::Zero();
      E(i, k) = 1.0;
      const double fd = (form.relaxed_q(Mat2(D + t * E)) - form.relaxed_q(Mat2(D - t * E))) / (2 * t);
      CHECK(std::abs(G(i, k) - fd) < 1e-6);
    }
}

TEST_CASE("singular optimality system") {
  const Well I(Mat3::Identity());
  const QuadraticForm3 zero(Mat9::Zero(), 4);
  try {
    RelaxedForm form(zero, I);
    FAIL("expected an exception");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("well 5") != std::string::npos);
  }
}

}  // TEST_SUITE
