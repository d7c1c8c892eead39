#pragma once

#include "alab/builtins.hpp"
#include "alab/classify.hpp"
#include "alab/integrate.hpp"
#include "alab/reconstruct.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>

namespace alab::cli {

using json = nlohmann::ordered_json;

constexpr std::uint64_t kDefaultSeed = 20240611;

/// Input problem located at a field of the scenario document.
class ScenarioError : public InputError {
 public:
  ScenarioError(const std::string& field, const std::string& what)
      : InputError(field + ": " + what), field_(field) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

enum class JobKind { identities, classify, reconstruct, integrate, convergence };
std::string to_string(JobKind kind);

struct Scenario {
  json document;
  std::string name;
  std::uint64_t seed = kDefaultSeed;
  std::optional<json> algebra;
  std::optional<std::string> manifold;
  std::optional<json> algebroid;
  std::optional<json> connection;
  ProbeConfig probes;
  Tolerances tolerances;
  DiffConfig diff;
  JobKind job = JobKind::classify;
  json job_spec;
  json expect = json::object();
};

/// Structural validation of the whole document. Unknown keys, wrong types and
/// missing required fields are rejected with the offending field path.
Scenario parse_scenario(const json& document);
/// Reads and parses a file; JSON syntax errors become ScenarioError("scenario", ...).
Scenario load_scenario(const std::string& path);

/// Replaces the scenario seed (probe seed and default connection seed).
void apply_seed(Scenario& scenario, std::uint64_t seed);

struct Model {
  AlgebroidPtr algebroid;
  std::optional<ReconstructionFixture> fixture;
};

LieAlgebra build_algebra(const json& spec, const std::string& field);
/// Resolves the algebroid from `algebroid`, `algebra` and `manifold`.
Model build_model(const Scenario& scenario);
AConnection build_connection(const json& spec, const std::string& field, const Model& model,
                             std::uint64_t seed);
TMConnection build_tm_connection(const json& spec, const std::string& field, const Model& model);
ActionODE build_problem(const json& spec, const std::string& field);
std::vector<double> build_ladder(const json& spec, const std::string& field);

}  // namespace alab::cli
