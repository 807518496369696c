#pragma once

// Experiment configuration: YAML sections model, grid, regime, load, state,
// minimize and output. Unknown keys are rejected with line diagnostics.

#include "mwplate/minimizer.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace mwplate::cli {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ModelConfig {
  std::vector<Mat3> wells;
  DensityKind density = DensityKind::green_lagrange;
  double q = 2.0;
  double p = 4.0;
  double well_scale = 1.0;
};

struct GridConfig {
  Vec2 lower = Vec2(-0.5, -0.5);
  Vec2 upper = Vec2(0.5, 0.5);
  int n1 = 101;
  int n2 = 101;
};

struct RegimeConfig {
  double alpha = 5.0;
  std::vector<double> h_list = {0.1, 0.05, 0.025, 0.0125};
  int n3 = 5;
  double gap_tolerance = 0.05;
  std::optional<double> limit;  ///< overrides the computed limit functional
};

struct LoadConfig {
  std::array<std::vector<double>, 3> coefficients;  ///< per component, order 1, x1, x2, x1^2, x1 x2, x2^2
  double scale = 1.0;
  std::optional<std::string> samples;  ///< CSV x1,x2,f1,f2,f3 on the grid nodes
};

struct ProfileConfig {
  Profile::Kind kind = Profile::Kind::cosine;
  double radius = 2.0;
  std::vector<double> coefficients;
  double amplitude = 1.0;
  Vec2 direction = Vec2(1.0, 0.0);
};

struct StateConfig {
  std::size_t well = 0;  ///< zero-based; written one-based in files
  std::vector<double> u1, u2, v;  ///< graded polynomial coefficients
  std::optional<ProfileConfig> profile;
};

struct MinimizeConfig {
  LimitRegime regime = LimitRegime::lvk;
  OptimizerSettings settings;
};

struct ExperimentConfig {
  std::string source;
  std::uint64_t seed = 42;
  ModelConfig model;
  GridConfig grid;
  RegimeConfig regime;
  LoadConfig load;
  StateConfig state;
  MinimizeConfig minimize;
  std::string output = ".";
};

ExperimentConfig parse_config_file(const std::string& path);
ExperimentConfig parse_config_string(const std::string& text, const std::string& source = "<string>");

/// Objects built from a configuration after all cross-field checks.
std::shared_ptr<const MultiWellModel> build_model(const ExperimentConfig& config);
GridPtr build_grid(const ExperimentConfig& config);
LoadField build_load(const ExperimentConfig& config, GridPtr grid);
PlateState build_state(const ExperimentConfig& config, GridPtr grid, const MultiWellModel& model);

}  // namespace mwplate::cli
