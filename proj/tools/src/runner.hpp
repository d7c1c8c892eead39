#pragma once

#include "scenario.hpp"

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>

namespace alab::cli {

enum ExitCode : int { kOk = 0, kExpectMismatch = 1, kInputError = 2, kNumericFailure = 3 };

struct RunOptions {
  /// Wins over the environment and the scenario.
  std::optional<std::uint64_t> seed;
  int jobs = 1;
};

struct RunOutcome {
  int exit_code = kOk;
  json report;
  /// file name -> contents
  std::map<std::string, std::string> csv;
  std::string message;
};

/// ALGEBROID_LAB_SEED, if set to a non-negative integer. Throws ScenarioError
/// for an unparseable value.
std::optional<std::uint64_t> seed_from_env();

/// Runs the scenario's job. Input errors propagate as InputError; numeric
/// failures are folded into the outcome with exit code 3.
RunOutcome run_scenario(Scenario scenario, const RunOptions& options);

/// Writes report.json and the CSV files, each through a temporary file that
/// is renamed into place.
void write_outputs(const std::filesystem::path& dir, const RunOutcome& outcome);

/// Full `run` command: load, run, write, report on `err`. Returns the exit code.
int run_command(const std::string& scenario_path, const std::string& out_dir,
                const RunOptions& options, std::ostream& out, std::ostream& err);

void list_builtins(std::ostream& out);

std::string version();

}  // namespace alab::cli
