#pragma once

#include "alab/connection.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace alab {

struct ProbeConfig {
  int num_batteries = 10;
  int degree = 2;
  int num_points = 20;
  std::uint64_t seed = 20240611;
  int jobs = 1;
};

struct Tolerances {
  double tol_hold = 1e-5;
  double tol_fail = 1e-2;
  /// Relaxed hold threshold for predicates built on nabla R / nabla T.
  double tol_hold_derivative = 1e-4;

  void validate() const;
};

/// Four random sections (X, Y, Z, W) drawn from one seed.
struct ProbeBattery {
  int id = 0;
  std::uint64_t seed = 0;
  std::vector<Section> sections;
};

struct ProbeSet {
  std::vector<Vec> points;
  std::vector<ProbeBattery> batteries;
  ProbeConfig config;
};

/// Deterministic probe set: points from `config.seed`, battery b from
/// `config.seed + 1000 * (b + 1)`.
ProbeSet make_probes(const Algebroid& alg, const ProbeConfig& config);

enum class Verdict { holds, fails, inconclusive };
std::string to_string(Verdict v);
Verdict decide(double residual, double tol_hold, double tol_fail);

/// Where the largest residual was seen.
struct Witness {
  int battery = -1;
  Vec point;
};

/// Max over batteries and points of |value(x)| / scale, where scale is the
/// product of the sup norms of the sections involved.
struct Residual {
  double max = 0.0;
  double mean = 0.0;
  Witness witness;
};

struct PredicateResult {
  std::string name;
  double residual = 0.0;
  double tol_hold = 0.0;
  double tol_fail = 0.0;
  Verdict verdict = Verdict::inconclusive;
  Witness witness;
};

struct ClassificationReport {
  std::string connection;
  std::string algebroid;
  std::vector<PredicateResult> predicates;
  /// post_lie decided from R and R-bar (the curvature criterion).
  PredicateResult post_lie_via_curvature;
  bool post_lie_agreement = false;
  ProbeConfig config;
  Tolerances tolerances;

  const PredicateResult& get(const std::string& name) const;
  Verdict verdict(const std::string& name) const { return get(name).verdict; }
};

/// Names in report order.
const std::vector<std::string>& predicate_names();

/// Thrown when a single probe cannot be evaluated; carries the probe id.
class ProbeError : public NumericError {
 public:
  ProbeError(int battery, const std::string& what)
      : NumericError("probe battery " + std::to_string(battery) + ": " + what), battery_(battery) {}
  int battery() const { return battery_; }

 private:
  int battery_;
};

ClassificationReport classify(const AConnection& conn, const ProbeSet& probes,
                              const Tolerances& tol = {});

/// Returns the list of violated implications between emitted verdicts
/// (pre_lie => lie_admissible, flat & torsion_free => pre_lie,
/// flat & parallel_torsion => post_lie). Empty when consistent.
std::vector<std::string> implication_violations(const ClassificationReport& report);

Residual check_rho_torsion(const AConnection& conn, const ProbeSet& probes);

/// Max |(X|>Y - Y|>X) - [X,Y]_J| for a connection on a tangent algebroid.
/// Throws InputError for any other parent.
Residual check_commutator_is_jacobi_lie(const AConnection& conn, const ProbeSet& probes);

struct TensorReport {
  std::string id;
  double max_residual = 0.0;
  double mean_residual = 0.0;
  double tolerance = 0.0;
  Witness witness;
  bool passed() const { return max_residual <= tolerance; }
};

struct IdentityTolerances {
  double covariant_torsion = 1e-4;
  double cyclic_torsion = 1e-4;
  double first_bianchi = 1e-4;
  double second_bianchi = 1e-3;
  double triple_bracket = 1e-4;
};

/// Residuals of the curvature/torsion identities that hold for every
/// connection on a Lie algebroid. Ids: covariant_torsion, cyclic_torsion,
/// first_bianchi, second_bianchi, triple_bracket.
std::vector<TensorReport> verify_identity_suite(const TensorCalculus& calc, const ProbeSet& probes,
                                                const IdentityTolerances& tol = {});
std::vector<TensorReport> verify_identity_suite(const AConnection& conn, const ProbeSet& probes,
                                                const IdentityTolerances& tol = {});

/// Tensoriality in each slot of R and T for f = 1 + x1^2. Ids: R_first,
/// R_second, R_third, T_first, T_second.
std::vector<TensorReport> tensoriality_residuals(const AConnection& conn, const ProbeSet& probes,
                                                 double tolerance = 1e-4);

/// Residual of a pointwise expression over a probe set. `expr` receives the
/// battery and returns the section to measure and its scale-defining inputs.
struct ProbeExpression {
  Section value;
  std::vector<const Section*> scale_by;
};
Residual measure(const ProbeSet& probes,
                 const std::function<ProbeExpression(const ProbeBattery&)>& expr, int jobs = 1);

}  // namespace alab
