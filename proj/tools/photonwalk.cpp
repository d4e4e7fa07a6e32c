#include <string>

#include <CLI11.hpp>

#include "photonwalk/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"photonwalk: one- and two-photon quantum walks in coupled waveguide lattices"};
  app.require_subcommand(1);

  std::string config_path;
  photonwalk::RunOptions options;

  CLI::App* run = app.add_subcommand("run", "execute the task described by a config file");
  run->add_option("config", config_path, "experiment config (JSON)")->required();
  run->add_option("--out", options.output_dir_override, "output directory override");
  run->add_flag("--fig5-compatible", options.fig5_compatible,
                "zero negative violation entries in exported CSVs");

  std::string validate_path;
  CLI::App* validate = app.add_subcommand("validate", "schema-check a config file");
  validate->add_option("config", validate_path, "experiment config (JSON)")->required();

  CLI11_PARSE(app, argc, argv);

  if (run->parsed()) return photonwalk::run_config_file(config_path, options);
  return photonwalk::validate_config_file(validate_path);
}
