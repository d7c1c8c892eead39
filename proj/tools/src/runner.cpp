#include "runner.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#ifndef ALAB_VERSION
#define ALAB_VERSION "0.0.0"
#endif

namespace alab::cli {

std::string version() { return ALAB_VERSION; }

namespace {

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json vec_json(const Vec& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

json mat_json(const Mat& m) {
  json out = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) out.push_back(vec_json(m.row(r).transpose()));
  return out;
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json witness_json(const Witness& w) {
  return {{"battery", w.battery}, {"point", vec_json(w.point)}};
}

std::string point_cell(const Vec& p) {
  std::string out;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (i) out += ' ';
    out += num(p[i]);
  }
  return out;
}

/// Job failures that are the scenario's fault carry the job field.
template <class F>
auto job_step(const std::string& field, F&& f) -> decltype(f()) {
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

struct JobOutput {
  json result = json::object();
  std::map<std::string, std::string> csv;
};

ProbeSet probes_for(const Scenario& s, const Algebroid& alg) {
  return job_step("probes", [&] { return make_probes(alg, s.probes); });
}

JobOutput run_identities(const Scenario& s, const Model& m, const AConnection& conn) {
  const json& t = s.job_spec["tolerances"];
  IdentityTolerances tol;
  tol.covariant_torsion = t["covariant_torsion"].get<double>();
  tol.cyclic_torsion = t["cyclic_torsion"].get<double>();
  tol.first_bianchi = t["first_bianchi"].get<double>();
  tol.second_bianchi = t["second_bianchi"].get<double>();
  tol.triple_bracket = t["triple_bracket"].get<double>();
  const ProbeSet probes = probes_for(s, *m.algebroid);
  std::vector<TensorReport> reports =
      job_step("job", [&] { return verify_identity_suite(conn, probes, tol); });
  if (s.job_spec["tensoriality"].get<bool>()) {
    const double tt = t["tensoriality"].get<double>();
    for (auto& r : job_step("job", [&] { return tensoriality_residuals(conn, probes, tt); })) {
      reports.push_back(r);
    }
  }
  JobOutput out;
  json rows = json::array();
  std::string csv = "identity,max_residual,mean_residual,tolerance,passed,witness_point\n";
  bool all = true;
  for (const auto& r : reports) {
    all = all && r.passed();
    rows.push_back({{"id", r.id},
                    {"max_residual", r.max_residual},
                    {"mean_residual", r.mean_residual},
                    {"tolerance", r.tolerance},
                    {"passed", r.passed()},
                    {"witness", witness_json(r.witness)}});
    csv += r.id + "," + num(r.max_residual) + "," + num(r.mean_residual) + "," +
           num(r.tolerance) + "," + (r.passed() ? "true" : "false") + "," +
           point_cell(r.witness.point) + "\n";
  }
  out.result["identities"] = rows;
  out.result["all_pass"] = all;
  out.csv["identities.csv"] = csv;
  return out;
}

json predicate_json(const PredicateResult& p) {
  return {{"name", p.name},
          {"residual", p.residual},
          {"tol_hold", p.tol_hold},
          {"tol_fail", p.tol_fail},
          {"verdict", to_string(p.verdict)},
          {"witness", witness_json(p.witness)}};
}

JobOutput run_classify(const Scenario& s, const Model& m, const AConnection& conn) {
  const ProbeSet probes = probes_for(s, *m.algebroid);
  const ClassificationReport report =
      job_step("job", [&] { return classify(conn, probes, s.tolerances); });
  JobOutput out;
  json preds = json::array();
  std::string csv = "predicate,residual,verdict,witness_point\n";
  auto row = [&](const PredicateResult& p) {
    csv += p.name + "," + num(p.residual) + "," + to_string(p.verdict) + "," +
           point_cell(p.witness.point) + "\n";
  };
  for (const auto& p : report.predicates) {
    preds.push_back(predicate_json(p));
    row(p);
  }
  row(report.post_lie_via_curvature);
  out.result["predicates"] = preds;
  out.result["post_lie_via_curvature"] = predicate_json(report.post_lie_via_curvature);
  out.result["post_lie_agreement"] = report.post_lie_agreement;
  out.result["implication_violations"] = implication_violations(report);
  out.csv["classification.csv"] = csv;
  return out;
}

TransportConfig transport_from(const json& t) {
  TransportConfig c;
  c.initial_steps = t["initial_steps"].get<int>();
  c.max_steps = t["max_steps"].get<int>();
  c.tolerance = t["tolerance"].get<double>();
  c.frame_steps = t["frame_steps"].get<int>();
  c.loops = t["loops"].get<int>();
  c.loop_size = t["loop_size"].get<double>();
  c.loop_tolerance = t["loop_tolerance"].get<double>();
  c.flatness_tolerance = t["flatness_tolerance"].get<double>();
  c.constancy_tolerance = t["constancy_tolerance"].get<double>();
  c.degenerate_tolerance = t["degenerate_tolerance"].get<double>();
  c.num_points = t["num_points"].get<int>();
  c.seed = t["seed"].get<std::uint64_t>();
  return c;
}

JobOutput run_reconstruct(const Scenario& s, const Model& m) {
  const json& job = s.job_spec;
  const std::string tm_name = job.contains("tm") ? job["tm"].get<std::string>()
                                                 : (m.fixture ? "fixture" : "flat");
  const TMConnection tm = build_tm_connection(json(tm_name), "job.tm", m);
  ReconstructOptions opts;
  opts.transport = transport_from(job["transport"]);
  if (job.contains("base_point")) {
    Vec b(static_cast<Eigen::Index>(job["base_point"].size()));
    for (std::size_t i = 0; i < job["base_point"].size(); ++i) {
      b[static_cast<Eigen::Index>(i)] = job["base_point"][i].get<double>();
    }
    if (b.size() != m.algebroid->num_vars() || !m.algebroid->base().contains(b)) {
      throw ScenarioError("job.base_point", "not a point of " + m.algebroid->base().name());
    }
    opts.base_point = b;
  }
  if (m.fixture && m.fixture->reference) opts.reference = m.fixture->reference;
  const bool has_reference = opts.reference.has_value() || m.algebroid->action().has_value();

  JobOutput out;
  out.result["tm"] = tm_name;
  ReconstructionResult r;
  try {
    r = job_step("job", [&] { return reconstruct_action(m.algebroid, tm, opts); });
  } catch (const ReconstructionError& e) {
    out.result["outcome"] = to_string(e.code());
    out.result["diagnostic"] = e.what();
    out.result["witness"] = vec_json(e.witness());
    return out;
  }
  const AlgebraInvariants inv = r.invariants;
  double max_c = 0.0;
  for (double c : r.recovered.structure_constants()) max_c = std::max(max_c, std::abs(c));
  out.result["outcome"] = "accepted";
  out.result["recovered"] = {{"dim", r.recovered.dim()},
                             {"structure_constants", r.recovered.structure_constants()}};
  out.result["abelian"] = r.abelian;
  out.result["killing_signature"] = {inv.killing_positive, inv.killing_negative, inv.killing_zero};
  out.result["derived_dim"] = inv.derived_dim;
  out.result["max_structure_constant"] = max_c;
  out.result["constancy_residual"] = r.constancy_residual;
  out.result["jacobi_residual"] = r.jacobi_residual;
  out.result["flatness_residual"] = r.flatness_residual;
  out.result["loop_residual"] = r.loop_residual;
  out.result["curvature_residual"] = r.curvature_residual;
  if (has_reference) {
    out.result["action_match_residual"] = r.action_match_residual;
    out.result["homomorphism_residual"] = r.homomorphism_residual;
    out.result["action_map"] = mat_json(r.action_map);
  } else {
    out.result["action_match_residual"] = nullptr;
    out.result["homomorphism_residual"] = nullptr;
  }
  if (job["round_trip"].get<bool>() && r.frame) {
    out.result["round_trip_residual"] =
        job_step("job", [&] { return round_trip_residual(*r.frame, r, *m.algebroid); });
  }
  const int k = r.recovered.dim();
  std::string csv = "i,j,k,value\n";
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      for (int l = 0; l < k; ++l) {
        csv += std::to_string(i + 1) + "," + std::to_string(j + 1) + "," + std::to_string(l + 1) +
               "," + num(r.recovered.c(i, j, l)) + "\n";
      }
    }
  }
  out.csv["structure_constants.csv"] = csv;
  return out;
}

JobOutput run_integrate(const Scenario& s) {
  const json& job = s.job_spec;
  const ActionODE p = build_problem(job["problem"], "job.problem");
  const Method method = method_from_string(job["method"].get<std::string>());
  const double h = job["h"].get<double>();
  const double horizon = job.contains("horizon") ? job["horizon"].get<double>() : p.horizon;
  const Trajectory t = job_step("job.h", [&] {
    return integrate(p, method, h, horizon, job["dexpinv_order"].get<int>());
  });
  JobOutput out;
  out.result["problem"] = p.name;
  out.result["method"] = to_string(method);
  out.result["horizon"] = horizon;
  out.result["steps"] = t.steps;
  out.result["final"] = vec_json(t.final);
  out.result["drift"] = t.drift;
  return out;
}

JobOutput run_convergence(const Scenario& s) {
  const json& job = s.job_spec;
  const ActionODE p = build_problem(job["problem"], "job.problem");
  const std::vector<double> ladder = build_ladder(job["ladder"], "job.ladder");
  const int order = job["dexpinv_order"].get<int>();
  JobOutput out;
  json tables = json::array();
  for (const json& name : job["methods"]) {
    const Method method = method_from_string(name.get<std::string>());
    const ConvergenceTable table =
        job_step("job", [&] { return convergence_study(p, method, ladder, order); });
    json rows = json::array();
    std::string csv = "h,error,drift\n";
    for (const auto& row : table.rows) {
      rows.push_back({{"h", row.h}, {"error", row.error}, {"drift", row.drift}});
      csv += num(row.h) + "," + num(row.error) + "," + num(row.drift) + "\n";
    }
    tables.push_back({{"method", to_string(method)},
                      {"problem", table.problem},
                      {"slope", number_or_null(table.slope)},
                      {"exact", table.exact},
                      {"reference_h", table.reference_h},
                      {"rows", rows}});
    out.csv["convergence_" + to_string(method) + ".csv"] = csv;
  }
  out.result["tables"] = tables;
  return out;
}

const json* find_named(const json& list, const char* key, const std::string& name) {
  for (const json& e : list) {
    if (e[key] == name) return &e;
  }
  return nullptr;
}

/// Observed value for one expectation key; null when the run did not produce it.
json observed(const Scenario& s, const json& result, const std::string& key) {
  switch (s.job) {
    case JobKind::classify: {
      if (key == "post_lie_agreement") return result["post_lie_agreement"];
      if (key == "consistent") return result["implication_violations"].empty();
      if (key == "post_lie_via_curvature") return result["post_lie_via_curvature"]["verdict"];
      const json* p = find_named(result["predicates"], "name", key);
      return p ? (*p)["verdict"] : json(nullptr);
    }
    case JobKind::identities: {
      if (key == "all_pass") return result["all_pass"];
      const json* r = find_named(result["identities"], "id", key);
      return r ? json((*r)["passed"].get<bool>() ? "pass" : "fail") : json(nullptr);
    }
    case JobKind::reconstruct: {
      static const std::map<std::string, std::string> bounds = {
          {"max_constancy_residual", "constancy_residual"},
          {"max_action_match_residual", "action_match_residual"},
          {"max_loop_residual", "loop_residual"},
          {"max_round_trip_residual", "round_trip_residual"},
          {"max_structure_constant", "max_structure_constant"}};
      const auto b = bounds.find(key);
      const std::string field = b == bounds.end() ? key : b->second;
      return result.contains(field) ? result[field] : json(nullptr);
    }
    case JobKind::integrate:
      return result["drift"];
    case JobKind::convergence: {
      double worst = 0.0;
      for (const json& t : result["tables"]) {
        for (const json& row : t["rows"]) worst = std::max(worst, row["drift"].get<double>());
      }
      return worst;
    }
  }
  return nullptr;
}

json check_expectations(const Scenario& s, const json& result, bool& all_ok) {
  json list = json::array();
  all_ok = true;
  for (const auto& item : s.expect.items()) {
    const std::string& key = item.key();
    const json& expected = item.value();
    if (s.job == JobKind::convergence && key == "slope") {
      for (const auto& m : expected.items()) {
        const json* t = find_named(result["tables"], "method", m.key());
        const json slope = t ? (*t)["slope"] : json(nullptr);
        const bool ok = slope.is_number() && slope.get<double>() >= m.value()[0].get<double>() &&
                        slope.get<double>() <= m.value()[1].get<double>();
        all_ok = all_ok && ok;
        list.push_back({{"key", "slope." + m.key()}, {"expected", m.value()}, {"actual", slope},
                        {"ok", ok}});
      }
      continue;
    }
    const json actual = observed(s, result, key);
    bool ok = false;
    if (key.rfind("max_", 0) == 0) {
      ok = actual.is_number() && actual.get<double>() <= expected.get<double>();
    } else {
      ok = actual == expected;
    }
    all_ok = all_ok && ok;
    list.push_back({{"key", key}, {"expected", expected}, {"actual", actual}, {"ok", ok}});
  }
  return list;
}

void write_atomically(const std::filesystem::path& target, const std::string& contents) {
  const std::filesystem::path tmp =
      target.parent_path() / ("." + target.filename().string() + ".tmp");
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::filesystem::filesystem_error("cannot write", tmp, std::make_error_code(std::errc::permission_denied));
    f << contents;
    f.close();
    if (!f) throw std::filesystem::filesystem_error("write failed", tmp, std::make_error_code(std::errc::io_error));
  }
  std::filesystem::rename(tmp, target);
}

}  // namespace

std::optional<std::uint64_t> seed_from_env() {
  const char* raw = std::getenv("ALGEBROID_LAB_SEED");
  if (!raw || !*raw) return std::nullopt;
  const std::string text(raw);
  if (text.find_first_not_of("0123456789") != std::string::npos || text.size() > 19) {
    throw ScenarioError("ALGEBROID_LAB_SEED", "expected a non-negative integer, got '" + text + "'");
  }
  return std::stoull(text);
}

RunOutcome run_scenario(Scenario s, const RunOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  if (options.seed) apply_seed(s, *options.seed);
  if (options.jobs < 1) throw ScenarioError("--jobs", "must be at least 1");
  s.probes.jobs = options.jobs;

  RunOutcome outcome;
  json& report = outcome.report;
  report["artifact"] = "algebroid-lab";
  report["version"] = version();
  report["scenario"] = s.document;
  report["seed"] = s.seed;
  report["job"] = s.job_spec;

  JobOutput out;
  try {
    const Model model = build_model(s);
    if (model.algebroid) report["algebroid"] = model.algebroid->name();
    std::optional<AConnection> conn;
    if (s.connection) conn = build_connection(*s.connection, "connection", model, s.seed);
    if (conn) report["connection"] = conn->name();
    switch (s.job) {
      case JobKind::identities: out = run_identities(s, model, *conn); break;
      case JobKind::classify: out = run_classify(s, model, *conn); break;
      case JobKind::reconstruct: out = run_reconstruct(s, model); break;
      case JobKind::integrate: out = run_integrate(s); break;
      case JobKind::convergence: out = run_convergence(s); break;
    }
    report["result"] = out.result;
    bool all_ok = true;
    report["expectations"] = check_expectations(s, out.result, all_ok);
    outcome.exit_code = all_ok ? kOk : kExpectMismatch;
    report["status"] = all_ok ? "ok" : "expect_mismatch";
    if (!all_ok) {
      for (const json& e : report["expectations"]) {
        if (!e["ok"].get<bool>()) {
          outcome.message += "expectation '" + e["key"].get<std::string>() + "' not met: expected " +
                             e["expected"].dump() + ", got " + e["actual"].dump() + "\n";
        }
      }
    }
    outcome.csv = std::move(out.csv);
  } catch (const NumericError& e) {
    outcome.exit_code = kNumericFailure;
    report["result"] = nullptr;
    report["expectations"] = json::array();
    report["status"] = "numeric_failure";
    report["diagnostic"] = e.what();
    outcome.message = std::string("numeric failure: ") + e.what() + "\n";
    outcome.csv.clear();
  }
  report["exit_code"] = outcome.exit_code;
  report["wall_time_s"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return outcome;
}

void write_outputs(const std::filesystem::path& dir, const RunOutcome& outcome) {
  std::filesystem::create_directories(dir);
  for (const auto& [name, contents] : outcome.csv) write_atomically(dir / name, contents);
  write_atomically(dir / "report.json", outcome.report.dump(2) + "\n");
}

int run_command(const std::string& scenario_path, const std::string& out_dir,
                const RunOptions& options, std::ostream& out, std::ostream& err) {
  try {
    Scenario s = load_scenario(scenario_path);
    RunOptions opts = options;
    if (!opts.seed) opts.seed = seed_from_env();
    const RunOutcome o = run_scenario(std::move(s), opts);
    write_outputs(out_dir, o);
    out << o.report["scenario"].value("name", "scenario") << ": " << o.report["job"]["type"].get<std::string>()
        << " " << o.report["status"].get<std::string>() << " (exit " << o.exit_code << "), report "
        << (std::filesystem::path(out_dir) / "report.json").string() << "\n";
    err << o.message;
    return o.exit_code;
  } catch (const InputError& e) {
    err << "input error: " << e.what() << "\n";
    return kInputError;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "output error: " << e.what() << "\n";
    return kInputError;
  } catch (const json::exception& e) {
    err << "input error: " << e.what() << "\n";
    return kInputError;
  } catch (const std::exception& e) {
    err << "numeric failure: " << e.what() << "\n";
    return kNumericFailure;
  }
}

void list_builtins(std::ostream& out) {
  std::string category;
  for (const CatalogEntry& e : builtin_catalog()) {
    if (e.category != category) {
      if (!category.empty()) out << "\n";
      category = e.category;
      out << category << "\n";
    }
    out << "  " << std::left << std::setw(26) << e.name << e.description << "\n";
  }
}

}  // namespace alab::cli
