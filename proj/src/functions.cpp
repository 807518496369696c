#include "mwplate/functions.hpp"

#include <map>

namespace mwplate {

Polynomial2::Polynomial2(std::vector<Term> terms) {
  std::map<std::pair<int, int>, double> merged;
  for (const Term& t : terms) {
    if (t.a < 0 || t.b < 0) throw std::invalid_argument("Polynomial2: negative exponent");
    merged[{t.a, t.b}] += t.c;
  }
  for (const auto& [ab, c] : merged)
    if (c != 0.0) terms_.push_back({ab.first, ab.second, c});
}

Polynomial2 Polynomial2::graded(const std::vector<double>& coefficients) {
  std::vector<Term> terms;
  std::size_t k = 0;
  for (int d = 0; k < coefficients.size(); ++d)
    for (int b = 0; b <= d && k < coefficients.size(); ++b, ++k) terms.push_back({d - b, b, coefficients[k]});
  return Polynomial2(std::move(terms));
}

double Polynomial2::operator()(const Vec2& x) const {
  double s = 0.0;
  for (const Term& t : terms_) s += t.c * std::pow(x(0), t.a) * std::pow(x(1), t.b);
  return s;
}

Polynomial2 Polynomial2::derivative(int axis) const {
  std::vector<Term> out;
  for (const Term& t : terms_) {
    if (axis == 0 && t.a > 0) out.push_back({t.a - 1, t.b, t.c * t.a});
    if (axis == 1 && t.b > 0) out.push_back({t.a, t.b - 1, t.c * t.b});
  }
  return Polynomial2(std::move(out));
}

Vec2 Polynomial2::gradient(const Vec2& x) const {
  return Vec2(derivative(0)(x), derivative(1)(x));
}

Mat2 Polynomial2::hessian(const Vec2& x) const {
  const Polynomial2 d1 = derivative(0);
  const double h12 = d1.derivative(1)(x);
  Mat2 H;
  H << d1.derivative(0)(x), h12, h12, derivative(1).derivative(1)(x);
  return H;
}

Polynomial2 Polynomial2::scaled(double s) const {
  std::vector<Term> out = terms_;
  for (Term& t : out) t.c *= s;
  return Polynomial2(std::move(out));
}

int Polynomial2::degree() const {
  int d = 0;
  for (const Term& t : terms_) d = std::max(d, t.a + t.b);
  return d;
}

std::vector<double> Polynomial2::graded_coefficients() const {
  const int d = degree();
  std::vector<double> out((d + 1) * (d + 2) / 2, 0.0);
  for (const Term& t : terms_) {
    const int total = t.a + t.b;
    out[total * (total + 1) / 2 + t.b] += t.c;
  }
  return out;
}

Profile Profile::cosine(double radius, double amplitude) {
  if (!(radius > 0.0)) throw std::invalid_argument("Profile: radius must be positive");
  Profile p;
  p.kind_ = Kind::cosine;
  p.radius_ = radius;
  p.amplitude_ = amplitude;
  return p;
}

Profile Profile::polynomial(std::vector<double> coefficients, double amplitude) {
  Profile p;
  p.kind_ = Kind::polynomial;
  p.coefficients_ = std::move(coefficients);
  p.amplitude_ = amplitude;
  return p;
}

double Profile::derivative(int order, double t) const {
  if (order < 0 || order > 3) throw std::invalid_argument("Profile: derivative order must be 0..3");
  if (kind_ == Kind::cosine) {
    const double r = radius_, s = t / r;
    switch (order) {
      case 0: return amplitude_ * r * (std::cos(s) - 1.0);
      case 1: return -amplitude_ * std::sin(s);
      case 2: return -amplitude_ * std::cos(s) / r;
      default: return amplitude_ * std::sin(s) / (r * r);
    }
  }
  double acc = 0.0;
  for (int k = static_cast<int>(coefficients_.size()) - 1; k >= order; --k) {
    double falling = 1.0;
    for (int m = 0; m < order; ++m) falling *= (k - m);
    acc = acc * t + coefficients_[k] * falling;
  }
  return amplitude_ * acc;
}

Profile Profile::scaled(double s) const {
  Profile p = *this;
  p.amplitude_ *= s;
  return p;
}

double Profile::max_slope(double lo, double hi) const {
  double best = 0.0;
  const int n = 2001;
  for (int k = 0; k < n; ++k) {
    const double t = lo + (hi - lo) * k / (n - 1);
    best = std::max(best, std::abs(derivative(1, t)));
  }
  return best;
}

}  // namespace mwplate
