#include "runner.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"algebroid-lab: connections on Lie algebroids, classification, reconstruction "
               "and integration"};
  app.set_version_flag("--version", alab::cli::version());
  app.require_subcommand(1);

  std::string scenario;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  int jobs = 1;
  CLI::App* run = app.add_subcommand("run", "Run a scenario and write report.json and CSV tables");
  run->add_option("scenario", scenario, "Scenario JSON file")->required();
  run->add_option("--out", out_dir, "Output directory")->required();
  run->add_option("--seed", seed, "Seed override (wins over ALGEBROID_LAB_SEED)");
  run->add_option("--jobs", jobs, "Worker threads for probe batteries")->check(CLI::PositiveNumber);

  CLI::App* list = app.add_subcommand("list-builtins", "Print the builtin catalog");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : alab::cli::kInputError;
  }

  if (*list) {
    alab::cli::list_builtins(std::cout);
    return 0;
  }
  alab::cli::RunOptions options;
  options.seed = seed;
  options.jobs = jobs;
  return alab::cli::run_command(scenario, out_dir, options, std::cout, std::cerr);
}
