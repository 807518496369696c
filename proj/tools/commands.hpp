#pragma once

#include "config.hpp"

#include "json.hpp"

#include <string>

namespace mwplate::cli {

/// Each command writes its files below config.output and returns the JSON
/// summary it wrote.
nlohmann::json cmd_qbar(const ExperimentConfig& config);
nlohmann::json cmd_converge(const ExperimentConfig& config);
nlohmann::json cmd_rotations(const ExperimentConfig& config);
nlohmann::json cmd_minimize(const ExperimentConfig& config);
nlohmann::json cmd_functionals(const ExperimentConfig& config);

/// Writes text to path through a temporary file and a rename.
void write_atomic(const std::string& path, const std::string& text);

/// Exit status of a command: 0 success, 2 configuration error, 3 numerical failure.
int run_command(const std::string& name, const std::string& config_path, const std::string& output_override);

}  // namespace mwplate::cli
