#pragma once

// Closed-form inputs: bivariate polynomials for displacements and loads, and
// one-dimensional profiles for developable lifts.

#include "mwplate/linalg.hpp"

#include <vector>

namespace mwplate {

/// Sum of c x1^a x2^b.
class Polynomial2 {
 public:
  struct Term {
    int a;
    int b;
    double c;
  };

  Polynomial2() = default;
  explicit Polynomial2(std::vector<Term> terms);
  /// Coefficients in graded order 1, x1, x2, x1^2, x1 x2, x2^2, x1^3, ...
  static Polynomial2 graded(const std::vector<double>& coefficients);

  double operator()(const Vec2& x) const;
  Polynomial2 derivative(int axis) const;
  Vec2 gradient(const Vec2& x) const;
  Mat2 hessian(const Vec2& x) const;
  Polynomial2 scaled(double s) const;

  const std::vector<Term>& terms() const { return terms_; }
  int degree() const;
  bool is_zero() const { return terms_.empty(); }
  /// Graded-order coefficients up to the polynomial's degree.
  std::vector<double> graded_coefficients() const;

 private:
  std::vector<Term> terms_;
};

/// Profile g: R -> R with derivatives up to third order.
class Profile {
 public:
  enum class Kind { cosine, polynomial };

  /// g(t) = amplitude r (cos(t/r) - 1): a circular arc of radius r when amplitude = 1.
  static Profile cosine(double radius, double amplitude = 1.0);
  /// g(t) = amplitude sum_k c_k t^k.
  static Profile polynomial(std::vector<double> coefficients, double amplitude = 1.0);

  /// Derivative of the given order (0..3) at t.
  double derivative(int order, double t) const;
  double operator()(double t) const { return derivative(0, t); }
  Profile scaled(double s) const;

  Kind kind() const { return kind_; }
  double radius() const { return radius_; }
  double amplitude() const { return amplitude_; }
  const std::vector<double>& coefficients() const { return coefficients_; }
  /// sup |g'| over [lo, hi] by dense sampling plus endpoints.
  double max_slope(double lo, double hi) const;

 private:
  Kind kind_ = Kind::polynomial;
  double radius_ = 1.0;
  double amplitude_ = 1.0;
  std::vector<double> coefficients_;
};

}  // namespace mwplate
