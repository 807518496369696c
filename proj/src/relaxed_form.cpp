#include "mwplate/relaxed_form.hpp"

#include <sstream>
#include <stdexcept>

namespace mwplate {

RelaxedForm::RelaxedForm(const QuadraticForm3& form, const Well& well)
    : form_(form), well_(well) {
  const Mat3& Ui = well_.inverse();
  std::array<Mat3, 3> G;
  for (int i = 0; i < 3; ++i) G[i] = Ui * transverse_completion(Vec3::Unit(i));
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k) system_(i, k) = form_.bilinear(G[i], G[k]);
  factor_.compute(system_);
  if (factor_.info() != Eigen::Success || system_.diagonal().minCoeff() <= 0.0) {
    std::ostringstream msg;
    msg << "RelaxedForm: optimality system of well " << form_.well() + 1
        << " is singular (Q is not coercive on transverse completions)";
    throw std::runtime_error(msg.str());
  }

  Mat3 rhs;
  for (int m = 0; m < 3; ++m) {
    const Mat3 Dm = Ui * embed(sym2_from_coordinates(Vec3::Unit(m)));
    for (int i = 0; i < 3; ++i) rhs(i, m) = form_.bilinear(G[i], Dm);
  }
  l_matrix_ = -factor_.solve(rhs);

  std::array<Mat3, 3> X;
  for (int m = 0; m < 3; ++m) X[m] = optimal_argument(sym2_from_coordinates(Vec3::Unit(m)));
  for (int m = 0; m < 3; ++m)
    for (int n = 0; n < 3; ++n) coefficients_(m, n) = form_.bilinear(X[m], X[n]);
  coefficients_ = (coefficients_ + coefficients_.transpose()) / 2.0;
}

Vec3 RelaxedForm::l_operator(const Mat2& D) const { return l_matrix_ * sym2_coordinates(D); }

Mat3 RelaxedForm::optimal_argument(const Mat2& D) const {
  const Mat2 S = (D + D.transpose()) / 2.0;
  return well_.inverse() * (embed(S) + transverse_completion(l_operator(S)));
}

double RelaxedForm::relaxed_q(const Mat2& D) const {
  const Vec3 d = sym2_coordinates(D);
  return d.dot(coefficients_ * d);
}

Mat2 RelaxedForm::gradient(const Mat2& D) const {
  const Vec3 g = 2.0 * coefficients_ * sym2_coordinates(D);
  const double off = g(2) / std::sqrt(2.0);
  Mat2 G;
  G << g(0), off, off, g(1);
  return G;
}

Vec3 RelaxedForm::stationarity_residual(const Mat2& D, const Vec3& a) const {
  const Mat2 S = (D + D.transpose()) / 2.0;
  const Mat3 X = well_.inverse() * (embed(S) + transverse_completion(a));
  Vec3 r;
  for (int i = 0; i < 3; ++i)
    r(i) = form_.bilinear(X, well_.inverse() * transverse_completion(Vec3::Unit(i)));
  return r;
}

RelaxedForm relaxed_form(const MultiWellModel& model, std::size_t j) {
  return RelaxedForm(hessian_Q(model, j), model.well(j));
}

}  // namespace mwplate
