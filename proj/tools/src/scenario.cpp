#include "scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace alab::cli {

std::string to_string(JobKind kind) {
  switch (kind) {
    case JobKind::identities: return "identities";
    case JobKind::classify: return "classify";
    case JobKind::reconstruct: return "reconstruct";
    case JobKind::integrate: return "integrate";
    case JobKind::convergence: return "convergence";
  }
  return "classify";
}

namespace {

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

/// Typed, path-aware view of a JSON object with a closed set of keys.
class Obj {
 public:
  Obj(const json& j, std::string path, std::initializer_list<const char*> allowed)
      : j_(j), path_(std::move(path)) {
    if (!j.is_object()) {
      throw ScenarioError(label(), std::string("expected an object, got ") + j.type_name());
    }
    for (const auto& item : j.items()) {
      const bool known = std::any_of(allowed.begin(), allowed.end(),
                                     [&](const char* a) { return item.key() == a; });
      if (!known) throw ScenarioError(label(), "unknown field '" + item.key() + "'");
    }
  }

  bool has(const std::string& key) const { return j_.contains(key); }
  std::string field(const std::string& key) const { return join(path_, key); }

  const json& at(const std::string& key) const {
    if (!has(key)) throw ScenarioError(field(key), "required field missing");
    return j_.at(key);
  }

  double number(const std::string& key) const {
    const json& v = at(key);
    if (!v.is_number()) throw ScenarioError(field(key), "expected a number");
    return v.get<double>();
  }
  double number(const std::string& key, double fallback) const {
    return has(key) ? number(key) : fallback;
  }
  double positive(const std::string& key, double fallback) const {
    const double v = number(key, fallback);
    if (!(v > 0.0) || !std::isfinite(v)) throw ScenarioError(field(key), "must be positive");
    return v;
  }

  long integer(const std::string& key) const {
    const json& v = at(key);
    if (!v.is_number_integer()) throw ScenarioError(field(key), "expected an integer");
    return v.get<long>();
  }
  long integer(const std::string& key, long fallback) const {
    return has(key) ? integer(key) : fallback;
  }
  int count(const std::string& key, int fallback, int lo, int hi) const {
    const long v = integer(key, fallback);
    if (v < lo || v > hi) {
      throw ScenarioError(field(key), "must lie in [" + std::to_string(lo) + ", " +
                                          std::to_string(hi) + "]");
    }
    return static_cast<int>(v);
  }

  bool boolean(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const json& v = at(key);
    if (!v.is_boolean()) throw ScenarioError(field(key), "expected true or false");
    return v.get<bool>();
  }

  std::string string(const std::string& key) const {
    const json& v = at(key);
    if (!v.is_string()) throw ScenarioError(field(key), "expected a string");
    return v.get<std::string>();
  }
  std::string string(const std::string& key, const std::string& fallback) const {
    return has(key) ? string(key) : fallback;
  }

  Vec vector(const std::string& key) const { return to_vec(at(key), field(key)); }

  static Vec to_vec(const json& v, const std::string& field) {
    if (!v.is_array() || v.empty()) throw ScenarioError(field, "expected a nonempty array of numbers");
    Vec out(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number()) throw ScenarioError(field, "expected a nonempty array of numbers");
      out[static_cast<Eigen::Index>(i)] = v[i].get<double>();
    }
    return out;
  }

 private:
  std::string label() const { return path_.empty() ? "scenario" : path_; }

  const json& j_;
  std::string path_;
};

std::uint64_t read_seed(const json& v, const std::string& field) {
  if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<long>() < 0)) {
    throw ScenarioError(field, "expected a non-negative integer seed");
  }
  return v.get<std::uint64_t>();
}

/// Runs a core constructor, attributing its input errors to `field`.
template <class F>
auto at_field(const std::string& field, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const ScenarioError&) {
    throw;
  } catch (const InputError& e) {
    throw ScenarioError(field, e.what());
  } catch (const UnsupportedError& e) {
    throw ScenarioError(field, e.what());
  } catch (const ConstructionError& e) {
    throw ScenarioError(field, e.what());
  }
}

ManifoldPtr manifold_named(const std::string& name, const std::string& field) {
  try {
    return make_manifold(name);
  } catch (const InputError&) {
    throw ScenarioError(field, "unknown manifold '" + name +
                                   "' (known: sphere2, torus2, so3_group, euclidean<n>)");
  }
}

Polynomial polynomial_from(const json& v, int num_vars, const std::string& field) {
  if (v.is_number()) return Polynomial::constant(num_vars, v.get<double>());
  if (!v.is_object()) {
    throw ScenarioError(field, "expected a number or a monomial map such as {\"x1^2 x3\": 0.5}");
  }
  std::map<std::string, double> monomials;
  for (const auto& item : v.items()) {
    if (!item.value().is_number()) {
      throw ScenarioError(field, "coefficient of '" + item.key() + "' is not a number");
    }
    monomials[item.key()] = item.value().get<double>();
  }
  return at_field(field, [&] { return Polynomial::from_monomials(num_vars, monomials); });
}

const std::vector<std::string>& reconstruction_outcomes() {
  static const std::vector<std::string> names = {
      "accepted",         "not_flat",           "path_dependent",    "non_transitive",
      "degenerate_frame", "constancy_violated", "unsupported_bundle"};
  return names;
}

bool contains(const std::vector<std::string>& names, const std::string& name) {
  return std::find(names.begin(), names.end(), name) != names.end();
}

void expect_verdict(const json& v, const std::string& field) {
  if (!v.is_string() || !contains({"holds", "fails", "inconclusive"}, v.get<std::string>())) {
    throw ScenarioError(field, "expected \"holds\", \"fails\" or \"inconclusive\"");
  }
}

void expect_bool(const json& v, const std::string& field) {
  if (!v.is_boolean()) throw ScenarioError(field, "expected true or false");
}

void expect_bound(const json& v, const std::string& field) {
  if (!v.is_number() || !(v.get<double>() >= 0.0)) {
    throw ScenarioError(field, "expected a non-negative number");
  }
}

void validate_expect(const json& expect, JobKind job, const json& job_spec) {
  if (!expect.is_object()) throw ScenarioError("expect", "expected an object");
  for (const auto& item : expect.items()) {
    const std::string& key = item.key();
    const json& v = item.value();
    const std::string field = "expect." + key;
    switch (job) {
      case JobKind::classify:
        if (contains(predicate_names(), key) || key == "post_lie_via_curvature") {
          expect_verdict(v, field);
        } else if (key == "post_lie_agreement" || key == "consistent") {
          expect_bool(v, field);
        } else {
          throw ScenarioError("expect", "unknown expectation '" + key + "' for a classify job");
        }
        break;
      case JobKind::identities: {
        static const std::vector<std::string> ids = {
            "covariant_torsion", "cyclic_torsion", "first_bianchi", "second_bianchi",
            "triple_bracket",    "R_first",        "R_second",      "R_third",
            "T_first",           "T_second"};
        if (key == "all_pass") {
          expect_bool(v, field);
        } else if (contains(ids, key)) {
          if (!v.is_string() || !contains({"pass", "fail"}, v.get<std::string>())) {
            throw ScenarioError(field, "expected \"pass\" or \"fail\"");
          }
        } else {
          throw ScenarioError("expect", "unknown expectation '" + key + "' for an identities job");
        }
        break;
      }
      case JobKind::reconstruct:
        if (key == "outcome") {
          if (!v.is_string() || !contains(reconstruction_outcomes(), v.get<std::string>())) {
            throw ScenarioError(field, "expected accepted, not_flat, path_dependent, "
                                       "non_transitive, degenerate_frame, constancy_violated or "
                                       "unsupported_bundle");
          }
        } else if (key == "abelian") {
          expect_bool(v, field);
        } else if (key == "killing_signature") {
          if (!v.is_array() || v.size() != 3 ||
              !std::all_of(v.begin(), v.end(), [](const json& e) { return e.is_number_integer(); })) {
            throw ScenarioError(field, "expected [positive, negative, zero] counts");
          }
        } else if (key == "derived_dim") {
          if (!v.is_number_integer()) throw ScenarioError(field, "expected an integer");
        } else if (key == "max_constancy_residual" || key == "max_action_match_residual" ||
                   key == "max_loop_residual" || key == "max_round_trip_residual" ||
                   key == "max_structure_constant") {
          expect_bound(v, field);
        } else {
          throw ScenarioError("expect", "unknown expectation '" + key + "' for a reconstruct job");
        }
        break;
      case JobKind::integrate:
        if (key != "max_drift") {
          throw ScenarioError("expect", "unknown expectation '" + key + "' for an integrate job");
        }
        expect_bound(v, field);
        break;
      case JobKind::convergence:
        if (key == "max_drift") {
          expect_bound(v, field);
        } else if (key == "slope") {
          if (!v.is_object()) throw ScenarioError(field, "expected {method: [low, high]}");
          for (const auto& m : v.items()) {
            const std::string mf = field + "." + m.key();
            const json& methods = job_spec.at("methods");
            if (!contains(methods.get<std::vector<std::string>>(), m.key())) {
              throw ScenarioError(mf, "method is not part of this convergence job");
            }
            const json& r = m.value();
            if (!r.is_array() || r.size() != 2 || !r[0].is_number() || !r[1].is_number() ||
                r[0].get<double>() > r[1].get<double>()) {
              throw ScenarioError(mf, "expected [low, high]");
            }
          }
        } else {
          throw ScenarioError("expect", "unknown expectation '" + key + "' for a convergence job");
        }
        break;
    }
  }
}

JobKind job_kind(const std::string& name, const std::string& field) {
  if (name == "identities") return JobKind::identities;
  if (name == "classify") return JobKind::classify;
  if (name == "reconstruct") return JobKind::reconstruct;
  if (name == "integrate") return JobKind::integrate;
  if (name == "convergence") return JobKind::convergence;
  throw ScenarioError(field, "unknown job '" + name +
                                 "' (expected identities, classify, reconstruct, integrate, "
                                 "convergence)");
}

/// Normalizes the job object: fills defaults so the report echoes what ran.
json normalize_job(const json& spec, JobKind kind) {
  json out = json::object();
  out["type"] = to_string(kind);
  switch (kind) {
    case JobKind::identities: {
      Obj o(spec, "job", {"type", "tolerances", "tensoriality"});
      out["tensoriality"] = o.boolean("tensoriality", false);
      const IdentityTolerances d;
      json t = {{"covariant_torsion", d.covariant_torsion}, {"cyclic_torsion", d.cyclic_torsion},
                {"first_bianchi", d.first_bianchi},         {"second_bianchi", d.second_bianchi},
                {"triple_bracket", d.triple_bracket}};
      if (o.has("tolerances")) {
        Obj to(o.at("tolerances"), "job.tolerances",
               {"covariant_torsion", "cyclic_torsion", "first_bianchi", "second_bianchi",
                "triple_bracket", "tensoriality"});
        for (auto& [k, v] : t.items()) v = to.positive(k, v.get<double>());
        t["tensoriality"] = to.positive("tensoriality", 1e-4);
      } else {
        t["tensoriality"] = 1e-4;
      }
      out["tolerances"] = t;
      break;
    }
    case JobKind::classify:
      Obj(spec, "job", {"type"});
      break;
    case JobKind::reconstruct: {
      Obj o(spec, "job", {"type", "tm", "base_point", "transport", "round_trip"});
      if (o.has("tm")) {
        out["tm"] = o.string("tm");
        if (!contains({"fixture", "flat"}, out["tm"].get<std::string>())) {
          throw ScenarioError("job.tm", "expected \"fixture\" or \"flat\"");
        }
      }
      if (o.has("base_point")) o.vector("base_point");
      if (o.has("base_point")) out["base_point"] = o.at("base_point");
      out["round_trip"] = o.boolean("round_trip", true);
      const TransportConfig d;
      json t = {{"initial_steps", d.initial_steps},
                {"max_steps", d.max_steps},
                {"tolerance", d.tolerance},
                {"frame_steps", d.frame_steps},
                {"loops", d.loops},
                {"loop_size", d.loop_size},
                {"loop_tolerance", d.loop_tolerance},
                {"flatness_tolerance", d.flatness_tolerance},
                {"constancy_tolerance", d.constancy_tolerance},
                {"degenerate_tolerance", d.degenerate_tolerance},
                {"num_points", d.num_points},
                {"seed", d.seed}};
      if (o.has("transport")) {
        Obj to(o.at("transport"), "job.transport",
               {"initial_steps", "max_steps", "tolerance", "frame_steps", "loops", "loop_size",
                "loop_tolerance", "flatness_tolerance", "constancy_tolerance",
                "degenerate_tolerance", "num_points", "seed"});
        for (const char* k : {"initial_steps", "max_steps", "frame_steps", "loops", "num_points"}) {
          t[k] = to.count(k, t[k].get<int>(), 1, 1 << 20);
        }
        for (const char* k : {"tolerance", "loop_size", "loop_tolerance", "flatness_tolerance",
                              "constancy_tolerance", "degenerate_tolerance"}) {
          t[k] = to.positive(k, t[k].get<double>());
        }
        if (to.has("seed")) t["seed"] = read_seed(to.at("seed"), "job.transport.seed");
        if (t["initial_steps"].get<int>() > t["max_steps"].get<int>()) {
          throw ScenarioError("job.transport.initial_steps", "exceeds max_steps");
        }
      }
      out["transport"] = t;
      break;
    }
    case JobKind::integrate: {
      Obj o(spec, "job", {"type", "problem", "method", "h", "horizon", "dexpinv_order"});
      out["problem"] = o.has("problem") ? o.at("problem") : json{{"kind", "sphere_test"}};
      build_problem(out["problem"], "job.problem");
      const std::string method = o.string("method", "rkmk4");
      at_field("job.method", [&] { return method_from_string(method); });
      out["method"] = method;
      out["h"] = o.positive("h", 0.01);
      if (o.has("horizon")) out["horizon"] = o.positive("horizon", 1.0);
      out["dexpinv_order"] = o.count("dexpinv_order", 2, 0, 2);
      break;
    }
    case JobKind::convergence: {
      Obj o(spec, "job", {"type", "problem", "methods", "ladder", "dexpinv_order"});
      out["problem"] = o.has("problem") ? o.at("problem") : json{{"kind", "sphere_test"}};
      build_problem(out["problem"], "job.problem");
      json methods = o.has("methods") ? o.at("methods") : json::array({"rkmk4"});
      if (!methods.is_array() || methods.empty()) {
        throw ScenarioError("job.methods", "expected a nonempty array of method names");
      }
      for (const json& m : methods) {
        if (!m.is_string()) throw ScenarioError("job.methods", "expected method names");
        at_field("job.methods", [&] { return method_from_string(m.get<std::string>()); });
      }
      out["methods"] = methods;
      out["ladder"] = o.has("ladder") ? o.at("ladder") : json{{"base", 0.1}, {"count", 5}};
      build_ladder(out["ladder"], "job.ladder");
      out["dexpinv_order"] = o.count("dexpinv_order", 2, 0, 2);
      break;
    }
  }
  return out;
}

}  // namespace

Scenario parse_scenario(const json& document) {
  Obj top(document, "",
          {"$schema", "name", "description", "seed", "algebra", "manifold", "algebroid",
           "connection", "probes", "tolerances", "job", "expect"});
  Scenario s;
  s.document = document;
  s.name = top.string("name", "scenario");
  top.string("description", "");

  std::optional<std::uint64_t> seed;
  if (top.has("seed")) seed = read_seed(top.at("seed"), "seed");

  if (top.has("algebra")) {
    s.algebra = top.at("algebra");
    build_algebra(*s.algebra, "algebra");
  }
  if (top.has("manifold")) {
    s.manifold = top.string("manifold");
    manifold_named(*s.manifold, "manifold");
  }
  if (top.has("algebroid")) s.algebroid = top.at("algebroid");
  if (top.has("connection")) s.connection = top.at("connection");

  if (top.has("probes")) {
    Obj p(top.at("probes"), "probes",
          {"num_sections", "num_batteries", "degree", "num_points", "seed"});
    if (p.has("num_sections") && p.has("num_batteries")) {
      throw ScenarioError("probes", "give num_sections or num_batteries, not both");
    }
    const char* batteries = p.has("num_sections") ? "num_sections" : "num_batteries";
    s.probes.num_batteries = p.count(batteries, s.probes.num_batteries, 1, 10000);
    s.probes.degree = p.count("degree", s.probes.degree, 0, 6);
    s.probes.num_points = p.count("num_points", s.probes.num_points, 1, 100000);
    if (p.has("seed")) {
      const std::uint64_t ps = read_seed(p.at("seed"), "probes.seed");
      if (seed && *seed != ps) throw ScenarioError("probes.seed", "conflicts with the top-level seed");
      seed = ps;
    }
  }
  s.seed = seed.value_or(kDefaultSeed);
  s.probes.seed = s.seed;

  if (top.has("tolerances")) {
    Obj t(top.at("tolerances"), "tolerances",
          {"tol_hold", "tol_fail", "tol_hold_derivative", "h1", "h2", "stencil"});
    s.tolerances.tol_hold = t.positive("tol_hold", s.tolerances.tol_hold);
    s.tolerances.tol_fail = t.positive("tol_fail", s.tolerances.tol_fail);
    s.tolerances.tol_hold_derivative =
        t.positive("tol_hold_derivative", s.tolerances.tol_hold_derivative);
    s.diff.h1 = t.positive("h1", s.diff.h1);
    s.diff.h2 = t.positive("h2", s.diff.h2);
    const long stencil = t.integer("stencil", s.diff.stencil);
    if (stencil != 2 && stencil != 4) throw ScenarioError("tolerances.stencil", "expected 2 or 4");
    s.diff.stencil = static_cast<int>(stencil);
    at_field("tolerances", [&] {
      s.tolerances.validate();
      return 0;
    });
    if (s.tolerances.tol_hold_derivative >= s.tolerances.tol_fail) {
      throw ScenarioError("tolerances.tol_hold_derivative", "must be smaller than tol_fail");
    }
  }

  const json& job = top.at("job");
  if (job.is_string()) {
    s.job = job_kind(job.get<std::string>(), "job");
    s.job_spec = normalize_job(json{{"type", job}}, s.job);
  } else {
    Obj j(job, "job", {"type", "tolerances", "tensoriality", "tm", "base_point", "transport",
                       "round_trip", "problem", "method", "h", "horizon", "dexpinv_order",
                       "methods", "ladder"});
    s.job = job_kind(j.string("type"), "job.type");
    s.job_spec = normalize_job(job, s.job);
  }

  const bool needs_connection = s.job == JobKind::identities || s.job == JobKind::classify;
  if (needs_connection && !s.connection) {
    throw ScenarioError("connection", "required field missing for a " + to_string(s.job) + " job");
  }
  if (s.job != JobKind::integrate && s.job != JobKind::convergence && !s.algebroid &&
      !(s.connection && s.connection->is_object() && s.connection->value("type", "") == "gauge_twisted") &&
      !(s.connection && s.connection->is_string() && s.connection->get<std::string>() == "gauge_twisted")) {
    throw ScenarioError("algebroid", "required field missing for a " + to_string(s.job) + " job");
  }

  if (top.has("expect")) {
    s.expect = top.at("expect");
    validate_expect(s.expect, s.job, s.job_spec);
  }
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("scenario", "cannot read '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ScenarioError("scenario", std::string("invalid JSON: ") + e.what());
  }
  return parse_scenario(doc);
}

void apply_seed(Scenario& scenario, std::uint64_t seed) {
  scenario.seed = seed;
  scenario.probes.seed = seed;
}

LieAlgebra build_algebra(const json& spec, const std::string& field) {
  if (spec.is_string()) {
    return at_field(field, [&] { return LieAlgebra::builtin(spec.get<std::string>()); });
  }
  Obj o(spec, field, {"name", "dim", "structure_constants", "brackets"});
  const int dim = o.count("dim", 0, 1, 12);
  const std::string name = o.string("name", "inline");
  std::vector<double> c(static_cast<std::size_t>(dim * dim * dim), 0.0);
  if (o.has("structure_constants") == o.has("brackets")) {
    throw ScenarioError(field, "give exactly one of structure_constants or brackets");
  }
  if (o.has("structure_constants")) {
    const Vec dense = o.vector("structure_constants");
    if (dense.size() != dim * dim * dim) {
      throw ScenarioError(o.field("structure_constants"),
                          "expected dim^3 = " + std::to_string(dim * dim * dim) + " entries");
    }
    for (int i = 0; i < dense.size(); ++i) c[static_cast<std::size_t>(i)] = dense[i];
  } else {
    // Sparse [e_i, e_j] = sum_k c e_k with 1-based indices; antisymmetry is implied.
    const json& list = o.at("brackets");
    if (!list.is_array()) throw ScenarioError(o.field("brackets"), "expected an array");
    for (std::size_t n = 0; n < list.size(); ++n) {
      const std::string ef = o.field("brackets") + "[" + std::to_string(n) + "]";
      Obj e(list[n], ef, {"i", "j", "k", "c"});
      const int i = e.count("i", 0, 1, dim) - 1;
      const int j = e.count("j", 0, 1, dim) - 1;
      const int k = e.count("k", 0, 1, dim) - 1;
      const double v = e.number("c");
      if (i == j) throw ScenarioError(ef, "[e_i, e_i] is zero; i and j must differ");
      c[static_cast<std::size_t>((i * dim + j) * dim + k)] += v;
      c[static_cast<std::size_t>((j * dim + i) * dim + k)] -= v;
    }
  }
  return at_field(field, [&] { return make_lie_algebra(name, dim, c); });
}

Model build_model(const Scenario& s) {
  Model m;
  json spec;
  if (!s.algebroid) {
    const bool gauge = s.connection && ((s.connection->is_string() &&
                                         s.connection->get<std::string>() == "gauge_twisted") ||
                                        (s.connection->is_object() &&
                                         s.connection->value("type", "") == "gauge_twisted"));
    if (!gauge) return m;
    spec = {{"type", "fixture"}, {"name", "gauge_twisted_so3"}};
  } else if (s.algebroid->is_string()) {
    spec = {{"type", "builtin"}, {"name", *s.algebroid}};
  } else {
    spec = *s.algebroid;
  }

  Obj o(spec, "algebroid", {"type", "name", "action", "scale"});
  const std::string type = o.string("type");
  const DiffConfig cfg = s.diff;

  auto need_manifold = [&]() -> ManifoldPtr {
    if (!s.manifold) throw ScenarioError("manifold", "required for a " + type + " algebroid");
    return manifold_named(*s.manifold, "manifold");
  };
  auto check_manifold = [&](const ManifoldPtr& actual) {
    if (s.manifold && *s.manifold != actual->name()) {
      throw ScenarioError("manifold", "'" + *s.manifold + "' does not match the algebroid base '" +
                                          actual->name() + "'");
    }
  };
  auto check_algebra = [&](const LieAlgebra& actual) {
    if (!s.algebra) return;
    const LieAlgebra given = build_algebra(*s.algebra, "algebra");
    if (given.name() != actual.name() || given.structure_constants() != actual.structure_constants()) {
      throw ScenarioError("algebra", "'" + given.name() + "' does not match the action algebra '" +
                                         actual.name() + "'");
    }
  };

  if (type == "action") {
    const Action action =
        at_field(o.field("action"), [&] { return builtin_action(o.string("action")); });
    check_manifold(action.manifold);
    check_algebra(action.algebra);
    m.algebroid = at_field("algebroid", [&] { return make_action_algebroid(action, cfg); });
  } else if (type == "tangent") {
    const ManifoldPtr mf = need_manifold();
    m.algebroid = at_field("algebroid", [&] { return make_tangent_algebroid(mf, cfg); });
  } else if (type == "bundle_of_lie_algebras") {
    const ManifoldPtr mf = need_manifold();
    if (!s.algebra) throw ScenarioError("algebra", "required for a bundle_of_lie_algebras algebroid");
    const LieAlgebra alg = build_algebra(*s.algebra, "algebra");
    const Polynomial scale = o.has("scale") ? polynomial_from(o.at("scale"), mf->ambient_dim(),
                                                              o.field("scale"))
                                            : Polynomial::constant(mf->ambient_dim(), 1.0);
    const std::vector<double> base = alg.structure_constants();
    auto constants = [base, scale](const Vec& x) {
      std::vector<double> c = base;
      const double f = scale(x);
      for (double& v : c) v *= f;
      return c;
    };
    m.algebroid = at_field("algebroid", [&] {
      return make_bundle_of_lie_algebras(mf, alg.dim(), constants, cfg, o.string("name", "bundle_of_lie_algebras"));
    });
  } else if (type == "builtin") {
    m.algebroid = at_field(o.field("name"), [&] { return builtin_algebroid(o.string("name"), cfg); });
    check_manifold(m.algebroid->base_ptr());
  } else if (type == "fixture") {
    m.fixture = at_field(o.field("name"), [&] { return reconstruction_fixture(o.string("name"), cfg); });
    m.algebroid = m.fixture->algebroid;
    check_manifold(m.algebroid->base_ptr());
  } else {
    throw ScenarioError("algebroid.type", "unknown algebroid type '" + type +
                                              "' (expected action, tangent, "
                                              "bundle_of_lie_algebras, builtin, fixture)");
  }
  if (type != "action" && type != "bundle_of_lie_algebras" && o.has("action")) {
    throw ScenarioError("algebroid.action", "only valid for an action algebroid");
  }
  if (type != "bundle_of_lie_algebras" && o.has("scale")) {
    throw ScenarioError("algebroid.scale", "only valid for a bundle_of_lie_algebras algebroid");
  }
  return m;
}

TMConnection build_tm_connection(const json& spec, const std::string& field, const Model& model) {
  if (!spec.is_string()) throw ScenarioError(field, "expected \"fixture\" or \"flat\"");
  const std::string name = spec.get<std::string>();
  if (name == "flat") return flat_tm_connection(model.algebroid);
  if (name == "fixture") {
    if (!model.fixture) {
      throw ScenarioError(field, "\"fixture\" needs an algebroid of type fixture");
    }
    return model.fixture->connection;
  }
  throw ScenarioError(field, "expected \"fixture\" or \"flat\"");
}

AConnection build_connection(const json& spec_in, const std::string& field, const Model& model,
                             std::uint64_t seed) {
  const json spec = spec_in.is_string() ? json{{"type", spec_in}} : spec_in;
  Obj o(spec, field, {"type", "gamma", "seed", "degree", "scale", "tm", "of", "name"});
  const std::string type = o.string("type");
  const AlgebroidPtr& alg = model.algebroid;
  if (!alg) throw ScenarioError("algebroid", "required to build a connection");

  auto wrap = [&](auto&& f) { return at_field(field, f); };

  if (type == "canonical_flat") return wrap([&] { return canonical_flat(alg); });
  if (type == "trivial") return wrap([&] { return trivial_connection(alg); });
  if (type == "so3_minus") return wrap([&] { return so3_minus_connection(alg); });
  if (type == "random_coefficient") {
    const std::uint64_t s = o.has("seed") ? read_seed(o.at("seed"), o.field("seed")) : seed;
    const int degree = o.count("degree", 1, 0, 4);
    const double scale = o.positive("scale", 0.5);
    return wrap([&] { return random_coefficient_connection(alg, s, degree, scale); });
  }
  if (type == "coefficient") {
    const int k = alg->fiber_dim();
    const int n = alg->num_vars();
    std::vector<Polynomial> gamma(static_cast<std::size_t>(k * k * k), Polynomial(n));
    const json& list = o.at("gamma");
    if (!list.is_array()) throw ScenarioError(o.field("gamma"), "expected an array of entries");
    for (std::size_t e = 0; e < list.size(); ++e) {
      const std::string ef = o.field("gamma") + "[" + std::to_string(e) + "]";
      Obj entry(list[e], ef, {"i", "j", "l", "poly"});
      const int i = entry.count("i", 0, 1, k) - 1;
      const int j = entry.count("j", 0, 1, k) - 1;
      const int l = entry.count("l", 0, 1, k) - 1;
      auto& slot = gamma[static_cast<std::size_t>((i * k + j) * k + l)];
      slot = slot + polynomial_from(entry.at("poly"), n, entry.field("poly"));
    }
    const std::string name = o.string("name", "coefficient");
    return wrap([&] { return coefficient_connection(alg, gamma, name); });
  }
  if (type == "induced_from_tm") {
    const TMConnection tm = build_tm_connection(o.has("tm") ? o.at("tm") : json("flat"),
                                                o.field("tm"), model);
    return wrap([&] { return induce_from_tm(tm, alg); });
  }
  if (type == "gauge_twisted") {
    if (!model.fixture || model.fixture->name != "gauge_twisted_so3") {
      throw ScenarioError(field, "gauge_twisted needs the gauge_twisted_so3 fixture algebroid");
    }
    return wrap([&] { return induce_from_tm(model.fixture->connection, alg); });
  }
  if (type == "dual" || type == "symmetrized") {
    const AConnection inner = build_connection(o.at("of"), o.field("of"), model, seed);
    if (type == "dual") return wrap([&] { return dual(inner); });
    return wrap([&] { return symmetrize(inner); });
  }
  throw ScenarioError(o.field("type"),
                      "unknown connection '" + type +
                          "' (expected canonical_flat, trivial, coefficient, random_coefficient, "
                          "induced_from_tm, gauge_twisted, dual, symmetrized, so3_minus)");
}

ActionODE build_problem(const json& spec, const std::string& field) {
  Obj o(spec, field, {"kind", "alpha", "beta", "gamma", "a", "y0", "horizon"});
  const std::string kind = o.string("kind");
  Vec y0;
  if (o.has("y0")) {
    y0 = o.vector("y0");
    if (y0.size() != 3 || std::abs(y0.norm() - 1.0) > 1e-12) {
      throw ScenarioError(o.field("y0"), "expected a unit vector in R^3");
    }
  }
  const double horizon = o.positive("horizon", 1.0);
  if (kind == "sphere_test") {
    if (o.has("a")) throw ScenarioError(o.field("a"), "only valid for kind constant");
    return sphere_test_problem(o.number("alpha", 1.0), o.number("beta", 0.5),
                               o.number("gamma", 1.0 / 3.0), y0, horizon);
  }
  if (kind == "constant") {
    for (const char* k : {"alpha", "beta", "gamma"}) {
      if (o.has(k)) throw ScenarioError(o.field(k), "only valid for kind sphere_test");
    }
    const Vec a = o.vector("a");
    if (a.size() != 3) throw ScenarioError(o.field("a"), "expected 3 entries");
    return constant_sphere_problem(a, y0, horizon);
  }
  throw ScenarioError(o.field("kind"), "unknown problem '" + kind + "' (expected sphere_test, constant)");
}

std::vector<double> build_ladder(const json& spec, const std::string& field) {
  std::vector<double> ladder;
  if (spec.is_array()) {
    const Vec v = Obj::to_vec(spec, field);
    ladder.assign(v.data(), v.data() + v.size());
  } else {
    Obj o(spec, field, {"base", "count"});
    ladder = step_ladder(o.positive("base", 0.1), o.count("count", 5, 1, 30));
  }
  at_field(field, [&] {
    if (ladder.size() < 4) throw InputError("convergence ladder needs at least 4 step sizes");
    for (std::size_t i = 1; i < ladder.size(); ++i) {
      if (!(ladder[i] < ladder[i - 1])) throw InputError("ladder step sizes must be strictly decreasing");
    }
    if (!(ladder.back() > 0.0)) throw InputError("ladder step sizes must be positive");
    return 0;
  });
  return ladder;
}

}  // namespace alab::cli
