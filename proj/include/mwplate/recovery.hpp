#pragma once

// Recovery deformations y_h(x', x3) = c0(x') + x3 c1(x') + x3^2 c2(x') for the
// four plate regimes and the rescaled three-dimensional energy along them.

#include "mwplate/energy_density.hpp"
#include "mwplate/plate_functionals.hpp"

#include <functional>
#include <string>

namespace mwplate {

enum class Regime { kirchhoff, cvk, vk, lvk };

std::string to_string(Regime regime);
Regime regime_from_string(const std::string& name);
/// alpha = 2 -> kirchhoff, 2 < alpha < 4 -> cvk, alpha = 4 -> vk, alpha > 4 -> lvk.
Regime regime_for_alpha(double alpha);

/// eta(h) = h^s with s inside the window (s_min, s_max) of the penalty hypotheses.
struct PenaltySchedule {
  double alpha;
  double gamma;
  double p;
  double q;
  double s;
  double s_min;
  double s_max;
  double requested_p;
  bool p_raised = false;

  double eta(double h) const { return std::pow(h, s); }
};

PenaltySchedule make_schedule(double alpha, double p, double q);

/// One x3-coefficient of the recovery deformation with its x'-derivatives.
struct Layer {
  Field<Vec3> c;
  Field<Mat32> grad;
  Field<Vec3> d11, d12, d22;
};

/// Layers c0, c1, c2 at a fixed h.
struct RecoveryLayers {
  Layer c0, c1, c2;
};

struct RescaledGradient {
  Mat3 F;        ///< (grad' y, d3 y / h)
  double hess2;  ///< |rescaled Hessian|^2
};

class RecoveryFamily {
 public:
  using Builder = std::function<RecoveryLayers(double h)>;

  RecoveryFamily(Regime regime, double alpha, std::size_t well, GridPtr grid, Builder builder);

  Regime regime() const { return regime_; }
  double alpha() const { return alpha_; }
  double gamma() const { return alpha_ / 2.0; }
  std::size_t well() const { return well_; }
  const MidplaneGrid& grid() const { return *grid_; }
  const Mat3& frame() const { return frame_; }

  /// Layers at h, with the frame rotation applied.
  RecoveryLayers layers(double h) const;
  /// Same family composed with a fixed rotation R.
  RecoveryFamily rotated(const Mat3& R) const;

 private:
  Regime regime_;
  double alpha_;
  std::size_t well_;
  GridPtr grid_;
  Builder builder_;
  Mat3 frame_ = Mat3::Identity();
};

/// Rescaled gradient and Hessian norm of y_h at node k and height x3.
RescaledGradient rescaled_derivatives(const RecoveryLayers& layers, int node, double x3, double h);

/// Builds the recovery family of the regime. For cvk the state must come from a
/// profile lift; for kirchhoff it must carry y.
RecoveryFamily build_recovery(const PlateState& state, const RelaxedForm& form, Regime regime, double alpha);

/// Gauss-Legendre nodes and weights on (-1/2, 1/2).
std::pair<std::vector<double>, std::vector<double>> gauss_legendre_unit(int n);

struct RescaledEnergy {
  double elastic = 0.0;
  double penalty = 0.0;
  double total() const { return elastic + penalty; }
};

/// h^-alpha int W(grad_h y_h) and h^-alpha eta^p int |grad_h^2 y_h|^p over S x (-1/2, 1/2).
RescaledEnergy rescaled_energy_3d(const MultiWellModel& model, const RecoveryFamily& family, double h, int n3 = 5);

struct ConvergenceRow {
  double h;
  double elastic;
  double penalty;
  double gap;
  double share;                  ///< penalty / elastic
  std::optional<double> order;   ///< local order against the previous row
};

struct ConvergenceReport {
  std::vector<ConvergenceRow> rows;
  double limit_value;
  PenaltySchedule schedule;
  std::optional<double> fitted_order;
  bool gaps_decreasing = false;
  bool share_decreasing = false;
  double final_share = 0.0;
  double final_relative_gap = 0.0;
  double gap_tolerance = 0.05;
  bool pass = false;

  void write_csv(const std::string& path) const;
};

/// Evaluates the family along h_list (decreasing, at least 4 entries). Passes
/// when gaps decrease strictly (or vanish), the final penalty share is below 5%
/// and the final gap is within gap_tolerance of |limit_value|.
ConvergenceReport convergence_report(const MultiWellModel& model, const RecoveryFamily& family,
                                     const std::vector<double>& h_list, double limit_value,
                                     int n3 = 5, double gap_tolerance = 0.05);

/// max over nodes of |grad c0^T grad c0 - (U^2)'| at h (cvk and kirchhoff families).
double midsurface_metric_residual(const RecoveryFamily& family, const Well& well, double h);

}  // namespace mwplate
