#pragma once

// Discrete minimization of the limit load problems over displacements, wells
// and maximizing rotations.

#include "mwplate/rotations.hpp"

namespace mwplate {

enum class LimitRegime { vk, lvk, cvk_profile, kl_profile };

std::string to_string(LimitRegime regime);
LimitRegime limit_regime_from_string(const std::string& name);

struct OptimizerSettings {
  double tolerance = 1e-6;   ///< on the lumped-mass gradient norm, relative to 1 + |value|
  int max_iterations = 20000;
  int rotation_grid = 16;    ///< points per tangent dimension of each rotation set
  int profile_degree = 4;    ///< profile regimes: g(t) = sum_{k=2}^{degree} c_k t^k
};

struct MinimizationProblem {
  LimitRegime regime = LimitRegime::lvk;
  std::shared_ptr<const MultiWellModel> model;
  LoadField load;
  std::vector<std::size_t> lambda;
  std::vector<RotationSet> sets;  ///< one per well of the model
  OptimizerSettings settings;
};

/// Problem for a model and load, with Lambda and the rotation sets computed.
MinimizationProblem make_problem(LimitRegime regime, std::shared_ptr<const MultiWellModel> model,
                                 const LoadField& load, const OptimizerSettings& settings = {});

struct TraceEntry {
  int iteration;
  double value;
  double gradient_norm;
};

/// J over the stacked unknowns (u1, u2, v) at fixed well and rotation, with the
/// analytic gradient (adjoint of the difference stencils).
class DisplacementObjective {
 public:
  DisplacementObjective(const RelaxedForm& form, const LoadField& load, const Mat3& R, bool nonlinear);

  int size() const { return 3 * n_; }
  double value(const Eigen::VectorXd& x) const;
  double value_and_gradient(const Eigen::VectorXd& x, Eigen::VectorXd& gradient) const;
  /// Removes affine v and infinitesimal rigid u (Euclidean-orthogonal projector).
  Eigen::VectorXd project(const Eigen::VectorXd& x) const;
  /// sqrt(sum g_k^2 / w_k): discrete L2 norm of the functional gradient.
  double gradient_norm(const Eigen::VectorXd& g) const;
  PlateState state(const Eigen::VectorXd& x, GridPtr grid) const;

 private:
  RelaxedForm form_;
  const MidplaneGrid* grid_;
  int n_;
  bool nonlinear_;
  double c2_;
  Eigen::VectorXd w_;
  Eigen::VectorXd force_;  ///< w_k f_k . R U^-1 e3
  SparseMatrix D1_, D2_, D11_, D12_, D22_;
  Eigen::MatrixXd gauge_u_, gauge_v_;  ///< orthonormal bases of the removed modes
};

struct DescentResult {
  Eigen::VectorXd x;
  double value;
  std::vector<TraceEntry> trace;
  bool converged;
};

/// Projected Polak-Ribiere conjugate gradients with Armijo backtracking.
DescentResult minimize_displacements(const DisplacementObjective& objective, const Eigen::VectorXd& x0,
                                     const OptimizerSettings& settings);

class MinimizationError : public std::runtime_error {
 public:
  MinimizationError(const std::string& what, std::vector<TraceEntry> trace)
      : std::runtime_error(what), trace_(std::move(trace)) {}
  const std::vector<TraceEntry>& trace() const { return trace_; }

 private:
  std::vector<TraceEntry> trace_;
};

struct CellResult {
  std::size_t well;
  int grid_index;
  Eigen::VectorXd theta;  ///< tangent coordinates of R in the well's rotation set
  Mat3 R;
  double value;
};

struct MinimizationResult {
  std::size_t well;
  PlateState state;
  Mat3 R;
  double value;
  std::vector<TraceEntry> trace;        ///< trace of the winning cell
  std::vector<CellResult> cells;        ///< every (well, rotation) cell evaluated
  std::vector<CellResult> near_optimal; ///< cells within 1e-8 max(1, |best|) of the best value
  std::vector<double> profile_parameters;  ///< profile regimes only: direction angle, c_2..c_degree
};

MinimizationResult minimize_regime(const MinimizationProblem& problem);

struct WellComparison {
  std::vector<CellResult> cells;
  std::vector<double> best_per_well;  ///< +inf for wells outside Lambda
  std::size_t winner;
};

WellComparison compare_wells(const MinimizationProblem& problem);

/// Rotation grid of a set: 16^dim points of [-pi, pi)^dim in tangent coordinates.
std::vector<Eigen::VectorXd> rotation_grid(const RotationSet& set, int points_per_dimension);

}  // namespace mwplate
