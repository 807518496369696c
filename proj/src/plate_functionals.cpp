#include "mwplate/plate_functionals.hpp"

#include <sstream>

namespace mwplate {

namespace {

void require_grid(const GridPtr& grid) {
  if (!grid) throw std::invalid_argument("PlateState: null grid");
}

// int_0^t g'(s)^2 ds by composite Simpson.
double slope_square_integral(const Profile& g, double t) {
  if (t == 0.0) return 0.0;
  int panels = static_cast<int>(std::ceil(std::abs(t) * 128.0));
  panels = std::max(2, panels + (panels % 2));
  const double step = t / panels;
  auto f = [&](double s) { return std::pow(g.derivative(1, s), 2); };
  double acc = f(0.0) + f(t);
  for (int k = 1; k < panels; ++k) acc += (k % 2 ? 4.0 : 2.0) * f(k * step);
  return acc * step / 3.0;
}

}  // namespace

PlateState PlateState::from_polynomials(GridPtr grid, std::size_t well, const Polynomial2& u1,
                                        const Polynomial2& u2, const Polynomial2& v) {
  require_grid(grid);
  PlateState s;
  s.grid_ = grid;
  s.well_ = well;
  const MidplaneGrid& g = *grid;
  s.u_ = Field<Vec2>::sample(g, [&](const Vec2& x) { return Vec2(u1(x), u2(x)); });
  s.grad_u_ = Field<Mat2>::sample(g, [&](const Vec2& x) {
    Mat2 G;
    G.row(0) = u1.gradient(x).transpose();
    G.row(1) = u2.gradient(x).transpose();
    return G;
  });
  s.v_ = Field<double>::sample(g, [&](const Vec2& x) { return v(x); });
  s.grad_v_ = Field<Vec2>::sample(g, [&](const Vec2& x) { return v.gradient(x); });
  s.hess_v_ = Field<Mat2>::sample(g, [&](const Vec2& x) { return v.hessian(x); });
  s.polynomials_ = std::array<Polynomial2, 3>{u1, u2, v};
  return s;
}

PlateState PlateState::from_samples(GridPtr grid, std::size_t well, const Field<Vec2>& u,
                                    const Field<double>& v) {
  require_grid(grid);
  if (!(u.grid() == *grid) || !(v.grid() == *grid)) {
    throw std::invalid_argument("PlateState: fields must share the state grid");
  }
  PlateState s;
  s.grid_ = grid;
  s.well_ = well;
  s.u_ = Field<Vec2>(*grid, u.values());
  s.v_ = Field<double>(*grid, v.values());
  s.grad_u_ = gradient(s.u_);
  s.grad_v_ = gradient(s.v_);
  s.hess_v_ = hessian(s.v_);
  return s;
}

PlateState PlateState::kirchhoff(GridPtr grid, std::size_t well, Deformation y) {
  require_grid(grid);
  PlateState s;
  s.grid_ = grid;
  s.well_ = well;
  s.y_ = Deformation{Field<Vec3>(*grid, y.y.values()), Field<Mat32>(*grid, y.grad.values()),
                     Field<Vec3>(*grid, y.y11.values()), Field<Vec3>(*grid, y.y12.values()),
                     Field<Vec3>(*grid, y.y22.values())};
  return s;
}

PlateState PlateState::from_profile(GridPtr grid, std::size_t well, const ProfileIsometry& lift) {
  require_grid(grid);
  PlateState s;
  s.grid_ = grid;
  s.well_ = well;
  const MidplaneGrid& g = *grid;
  const double c2 = lift.well().normal_direction().squaredNorm();
  const Vec2 An = lift.metric_root() * lift.direction();
  const Profile& p = lift.profile();
  s.u_ = Field<Vec2>::sample(g, [&](const Vec2& x) {
    return Vec2(-0.5 * c2 * slope_square_integral(p, An.dot(x)) * An);
  });
  s.grad_u_ = Field<Mat2>::sample(g, [&](const Vec2& x) {
    const double g1 = p.derivative(1, An.dot(x));
    return Mat2(-0.5 * c2 * g1 * g1 * An * An.transpose());
  });
  s.v_ = Field<double>::sample(g, [&](const Vec2& x) { return lift.v_at(x); });
  s.grad_v_ = Field<Vec2>::sample(g, [&](const Vec2& x) { return lift.grad_v_at(x); });
  s.hess_v_ = Field<Mat2>::sample(g, [&](const Vec2& x) { return lift.hess_v_at(x); });
  s.profile_ = ProfileSource{lift.profile(), lift.direction()};
  return s;
}

PlateState PlateState::zero(GridPtr grid, std::size_t well) {
  const Polynomial2 z;
  return from_polynomials(std::move(grid), well, z, z, z);
}

const Deformation& PlateState::deformation() const {
  if (!y_) throw std::logic_error("PlateState: no deformation y (not a Kirchhoff state)");
  return *y_;
}

PlateState PlateState::with_scaled_v(double t) const {
  PlateState s = *this;
  s.v_ = v_.map([t](double x) { return t * x; });
  s.grad_v_ = grad_v_.map([t](const Vec2& x) { return Vec2(t * x); });
  s.hess_v_ = hess_v_.map([t](const Mat2& x) { return Mat2(t * x); });
  if (s.polynomials_) (*s.polynomials_)[2] = (*s.polynomials_)[2].scaled(t);
  s.profile_.reset();
  return s;
}

LoadField::LoadField(GridPtr grid, const Field<Vec3>& f) : grid_(std::move(grid)) {
  if (!grid_) throw std::invalid_argument("LoadField: null grid");
  f_ = Field<Vec3>(*grid_, f.values());
  resultant_ = integrate(f_);
  mean_zero_ = resultant_.norm() <= mean_tolerance;
}

double rectangle_moment(const MidplaneGrid& grid, int a, int b) {
  auto one = [](double lo, double hi, int e) { return (std::pow(hi, e + 1) - std::pow(lo, e + 1)) / (e + 1); };
  return one(grid.lower()(0), grid.upper()(0), a) * one(grid.lower()(1), grid.upper()(1), b);
}

double integrate_exact(const Polynomial2& p, const MidplaneGrid& grid) {
  double acc = 0.0;
  for (const auto& t : p.terms()) acc += t.c * rectangle_moment(grid, t.a, t.b);
  return acc;
}

LoadField LoadField::from_polynomials(GridPtr grid, const std::array<Polynomial2, 3>& f) {
  if (!grid) throw std::invalid_argument("LoadField: null grid");
  const Field<Vec3> samples =
      Field<Vec3>::sample(*grid, [&](const Vec2& x) { return Vec3(f[0](x), f[1](x), f[2](x)); });
  LoadField load(grid, samples);
  load.polynomials_ = f;
  load.resultant_ = Vec3(integrate_exact(f[0], *grid), integrate_exact(f[1], *grid), integrate_exact(f[2], *grid));
  load.mean_zero_ = load.resultant_.norm() <= mean_tolerance;
  return load;
}

LoadField LoadField::zero(GridPtr grid) {
  return from_polynomials(std::move(grid), {Polynomial2(), Polynomial2(), Polynomial2()});
}

LoadField LoadField::scaled(double s) const {
  if (polynomials_) {
    return from_polynomials(grid_, {(*polynomials_)[0].scaled(s), (*polynomials_)[1].scaled(s),
                                    (*polynomials_)[2].scaled(s)});
  }
  return LoadField(grid_, f_.map([s](const Vec3& x) { return Vec3(s * x); }));
}

namespace {

void require_displacements(const PlateState& state, const char* who) {
  if (!state.has_displacements()) throw std::invalid_argument(std::string(who) + ": state has no (u, v) fields");
}

template <typename Fn> double quadrature(const MidplaneGrid& grid, Fn&& integrand) {
  const Eigen::VectorXd& w = grid.weights();
  double acc = 0.0;
  for (int k = 0; k < grid.size(); ++k)
    if (w(k) != 0.0) acc += w(k) * integrand(k);
  return acc;
}

}  // namespace

double energy_kl(const PlateState& state, const RelaxedForm& form) {
  if (!state.has_deformation()) throw std::invalid_argument("energy_kl: state carries no deformation y");
  const Deformation& y = state.deformation();
  const Well& well = form.well();
  normal_vector_nu(y.grad, well);  // metric check
  const Field<Mat32> grad_nu = normal_vector_nu_gradient(y, well);
  return quadrature(state.grid(), [&](int k) {
           return form.relaxed_q(Mat2(y.grad[k].transpose() * grad_nu[k]));
         }) / 24.0;
}

double bending_energy(const PlateState& state, const RelaxedForm& form) {
  require_displacements(state, "bending_energy");
  return quadrature(state.grid(), [&](int k) { return form.relaxed_q(state.hess_v()[k]); }) / 24.0;
}

double membrane_energy(const PlateState& state, const RelaxedForm& form, bool nonlinear) {
  require_displacements(state, "membrane_energy");
  const double c2 = nonlinear ? form.well().normal_direction().squaredNorm() : 0.0;
  return quadrature(state.grid(), [&](int k) {
           const Mat2& G = state.grad_u()[k];
           const Vec2& gv = state.grad_v()[k];
           return form.relaxed_q(Mat2(G + G.transpose() + c2 * gv * gv.transpose()));
         }) / 8.0;
}

double energy_cvk(const PlateState& state, const RelaxedForm& form, double tolerance) {
  const double r = constraint_residual(state, form.well());
  if (!(r < tolerance)) {
    std::ostringstream msg;
    msg << "energy_cvk: compatibility constraint residual " << r << " exceeds " << tolerance;
    throw ConstraintError(msg.str(), r);
  }
  return bending_energy(state, form);
}

double energy_vk(const PlateState& state, const RelaxedForm& form) {
  return bending_energy(state, form) + membrane_energy(state, form, true);
}

double energy_lvk(const PlateState& state, const RelaxedForm& form) {
  return bending_energy(state, form) + membrane_energy(state, form, false);
}

double constraint_residual(const PlateState& state, const Well& well) {
  require_displacements(state, "constraint_residual");
  const double c2 = well.normal_direction().squaredNorm();
  double worst = 0.0;
  for (int k = 0; k < state.grid().size(); ++k) {
    if (!state.grid().in_mask(k)) continue;
    const Mat2& G = state.grad_u()[k];
    const Vec2& gv = state.grad_v()[k];
    worst = std::max(worst, (G + G.transpose() + c2 * gv * gv.transpose()).norm());
  }
  return worst;
}

double force_work(const PlateState& state, const LoadField& load, const Mat3& R, const Well& well) {
  require_displacements(state, "force_work");
  const Vec3 d = R * well.normal_direction();
  return quadrature(state.grid(), [&](int k) { return load.f()[k].dot(d) * state.v()[k]; });
}

}  // namespace mwplate
