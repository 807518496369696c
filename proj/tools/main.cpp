#include "commands.hpp"

#include "CLI11.hpp"

int main(int argc, char** argv) {
  CLI::App app{"mwplate: multi-well thin plate experiments"};
  app.require_subcommand(1);
  std::string config_path;
  std::string output;

  const std::pair<const char*, const char*> commands[] = {
      {"qbar", "relaxed plate forms and completion operators per well"},
      {"converge", "rescaled 3-D energies along a recovery family"},
      {"rotations", "optimal rotations, Lambda and rotation-set dimensions for the load"},
      {"minimize", "minimize the limit load problem"},
      {"functionals", "limit plate functionals of the configured state"},
  };
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("config", config_path, "YAML experiment configuration")->required()->check(CLI::ExistingFile);
    sub->add_option("-o,--output", output, "output directory (overrides the config)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  return mwplate::cli::run_command(app.get_subcommands().front()->get_name(), config_path, output);
}
