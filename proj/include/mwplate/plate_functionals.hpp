#pragma once

#include "mwplate/midplane_geometry.hpp"
#include "mwplate/relaxed_form.hpp"

#include <array>
#include <memory>
#include <optional>

namespace mwplate {

using GridPtr = std::shared_ptr<const MidplaneGrid>;

/// Limit displacements (u, v) with derivatives, or a full Kirchhoff deformation y.
/// Derivatives are exact when built from closed forms and second-order finite
/// differences when built from samples.
class PlateState {
 public:
  static PlateState from_polynomials(GridPtr grid, std::size_t well, const Polynomial2& u1,
                                     const Polynomial2& u2, const Polynomial2& v);
  static PlateState from_samples(GridPtr grid, std::size_t well, const Field<Vec2>& u, const Field<double>& v);
  /// Kirchhoff state: y with second derivatives; u, v are not used.
  static PlateState kirchhoff(GridPtr grid, std::size_t well, Deformation y);
  /// v from the profile and the compatible in-plane displacement
  /// u = w(t) A n, w' = -|U^-1 e3|^2 g'^2 / 2, which satisfies the constraint exactly.
  static PlateState from_profile(GridPtr grid, std::size_t well, const ProfileIsometry& lift);
  static PlateState zero(GridPtr grid, std::size_t well);

  const MidplaneGrid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  std::size_t well() const { return well_; }

  bool has_displacements() const { return !v_.empty(); }
  const Field<Vec2>& u() const { return u_; }
  const Field<Mat2>& grad_u() const { return grad_u_; }  ///< (grad u)_ik = d_k u_i
  const Field<double>& v() const { return v_; }
  const Field<Vec2>& grad_v() const { return grad_v_; }
  const Field<Mat2>& hess_v() const { return hess_v_; }

  bool has_deformation() const { return y_.has_value(); }
  const Deformation& deformation() const;

  /// Closed-form sources, when the state was built from them.
  const std::optional<std::array<Polynomial2, 3>>& polynomials() const { return polynomials_; }

  /// Profile and direction when the state was built by from_profile.
  struct ProfileSource {
    Profile profile;
    Vec2 direction;
  };
  const std::optional<ProfileSource>& profile_source() const { return profile_; }

  /// Copy with v scaled by t (u unchanged).
  PlateState with_scaled_v(double t) const;

 private:
  GridPtr grid_;
  std::size_t well_ = 0;
  Field<Vec2> u_;
  Field<Mat2> grad_u_;
  Field<double> v_;
  Field<Vec2> grad_v_;
  Field<Mat2> hess_v_;
  std::optional<Deformation> y_;
  std::optional<std::array<Polynomial2, 3>> polynomials_;
  std::optional<ProfileSource> profile_;
};

/// Dead load f on S, optionally with polynomial components for exact moments.
class LoadField {
 public:
  static constexpr double mean_tolerance = 1e-10;

  LoadField(GridPtr grid, const Field<Vec3>& f);
  static LoadField from_polynomials(GridPtr grid, const std::array<Polynomial2, 3>& f);
  static LoadField zero(GridPtr grid);

  const Field<Vec3>& f() const { return f_; }
  const MidplaneGrid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  bool mean_zero() const { return mean_zero_; }
  Vec3 resultant() const { return resultant_; }
  const std::optional<std::array<Polynomial2, 3>>& polynomials() const { return polynomials_; }
  LoadField scaled(double s) const;

 private:
  GridPtr grid_;
  Field<Vec3> f_;
  Vec3 resultant_;
  bool mean_zero_ = false;
  std::optional<std::array<Polynomial2, 3>> polynomials_;
};

/// Exact integral of x1^a x2^b over the grid rectangle.
double rectangle_moment(const MidplaneGrid& grid, int a, int b);
/// Exact integral of a polynomial over the grid rectangle.
double integrate_exact(const Polynomial2& p, const MidplaneGrid& grid);

/// (1/24) int Qbar(grad y^T grad nu).
double energy_kl(const PlateState& state, const RelaxedForm& form);
/// (1/24) int Qbar(hess v); requires the compatibility residual below 1e-6.
double energy_cvk(const PlateState& state, const RelaxedForm& form, double tolerance = 1e-6);
/// (1/24) int Qbar(hess v) + (1/8) int Qbar(grad u^T + grad u + |U^-1 e3|^2 grad v (x) grad v).
double energy_vk(const PlateState& state, const RelaxedForm& form);
/// (1/24) int Qbar(hess v) + (1/8) int Qbar(grad u^T + grad u).
double energy_lvk(const PlateState& state, const RelaxedForm& form);

/// Bending and membrane parts of the von Karman-type functionals.
double bending_energy(const PlateState& state, const RelaxedForm& form);
double membrane_energy(const PlateState& state, const RelaxedForm& form, bool nonlinear);

/// max over nodes of |grad u^T + grad u + |U^-1 e3|^2 grad v (x) grad v|.
double constraint_residual(const PlateState& state, const Well& well);

/// int f . (R U^-1 e3) v.
double force_work(const PlateState& state, const LoadField& load, const Mat3& R, const Well& well);

class ConstraintError : public std::runtime_error {
 public:
  ConstraintError(const std::string& what, double residual) : std::runtime_error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

}  // namespace mwplate
