#include "alab/classify.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <future>
#include <map>
#include <random>

namespace alab {

void Tolerances::validate() const {
  if (!(tol_hold > 0.0) || !(tol_fail > 0.0) || !(tol_hold_derivative > 0.0)) {
    throw InputError("tolerances must be positive");
  }
  if (!(tol_hold < tol_fail) || !(tol_hold_derivative < tol_fail)) {
    throw InputError("tol_hold must be smaller than tol_fail");
  }
}

ProbeSet make_probes(const Algebroid& alg, const ProbeConfig& config) {
  if (config.num_batteries < 1 || config.num_points < 1) {
    throw InputError("probe battery must be nonempty");
  }
  if (config.degree < 0) throw InputError("probe degree must be non-negative");
  ProbeSet probes;
  probes.config = config;
  probes.points = alg.base().sample_points(config.num_points, config.seed);
  for (int b = 0; b < config.num_batteries; ++b) {
    ProbeBattery battery;
    battery.id = b;
    battery.seed = config.seed + 1000ULL * static_cast<std::uint64_t>(b + 1);
    std::mt19937_64 rng(battery.seed);
    for (int s = 0; s < 4; ++s) battery.sections.push_back(alg.random_section(rng, config.degree));
    probes.batteries.push_back(std::move(battery));
  }
  return probes;
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::holds: return "holds";
    case Verdict::fails: return "fails";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

Verdict decide(double residual, double tol_hold, double tol_fail) {
  if (residual < tol_hold) return Verdict::holds;
  if (residual > tol_fail) return Verdict::fails;
  return Verdict::inconclusive;
}

namespace {

struct BatteryResidual {
  double max = 0.0;
  double sum = 0.0;
  int count = 0;
  Vec point;
};

BatteryResidual measure_battery(const ProbeSet& probes, const ProbeBattery& battery,
                                const std::function<ProbeExpression(const ProbeBattery&)>& expr) {
  const ProbeExpression e = expr(battery);
  double scale = 1.0;
  for (const Section* s : e.scale_by) scale *= sup_norm(*s, probes.points);
  scale = std::max(scale, 1e-12);
  BatteryResidual out;
  for (const Vec& x : probes.points) {
    const double r = e.value(x).norm() / scale;
    if (!std::isfinite(r)) {
      throw ProbeError(battery.id, "non-finite residual at " + format_vec(x));
    }
    out.sum += r;
    ++out.count;
    if (out.point.size() == 0 || r > out.max) {
      out.max = r;
      out.point = x;
    }
  }
  return out;
}

}  // namespace

Residual measure(const ProbeSet& probes,
                 const std::function<ProbeExpression(const ProbeBattery&)>& expr, int jobs) {
  const int n = static_cast<int>(probes.batteries.size());
  if (n == 0 || probes.points.empty()) throw InputError("probe battery must be nonempty");
  std::vector<BatteryResidual> parts(n);

  auto run_one = [&](int b) {
    try {
      parts[b] = measure_battery(probes, probes.batteries[b], expr);
    } catch (const ProbeError&) {
      throw;
    } catch (const std::exception& ex) {
      throw ProbeError(probes.batteries[b].id, ex.what());
    }
  };

  jobs = std::clamp(jobs, 1, n);
  if (jobs == 1) {
    for (int b = 0; b < n; ++b) run_one(b);
  } else {
    std::vector<std::future<void>> workers;
    for (int w = 0; w < jobs; ++w) {
      workers.push_back(std::async(std::launch::async, [&, w] {
        for (int b = w; b < n; b += jobs) run_one(b);
      }));
    }
    for (auto& f : workers) f.get();
  }

  Residual res;
  double sum = 0.0;
  int count = 0;
  for (int b = 0; b < n; ++b) {
    sum += parts[b].sum;
    count += parts[b].count;
    if (res.witness.battery < 0 || parts[b].max > res.max) {
      res.max = parts[b].max;
      res.witness.battery = probes.batteries[b].id;
      res.witness.point = parts[b].point;
    }
  }
  res.mean = sum / count;
  return res;
}

const std::vector<std::string>& predicate_names() {
  static const std::vector<std::string> names = {
      "lie_admissible", "pre_lie",           "post_lie",           "flat",
      "dual_flat",      "torsion_free",      "parallel_torsion",   "parallel_curvature",
      "invariant",      "rho_torsion_free"};
  return names;
}

const PredicateResult& ClassificationReport::get(const std::string& name) const {
  for (const auto& p : predicates) {
    if (p.name == name) return p;
  }
  throw InputError("unknown predicate '" + name + "'");
}

namespace {

const Section& X_of(const ProbeBattery& b) { return b.sections[0]; }
const Section& Y_of(const ProbeBattery& b) { return b.sections[1]; }
const Section& Z_of(const ProbeBattery& b) { return b.sections[2]; }
const Section& W_of(const ProbeBattery& b) { return b.sections[3]; }

Section cyclic(const std::function<Section(const Section&, const Section&, const Section&)>& f,
               const Section& X, const Section& Y, const Section& Z) {
  return f(X, Y, Z) + f(Y, Z, X) + f(Z, X, Y);
}

PredicateResult make_result(std::string name, const Residual& r, double hold, double fail) {
  PredicateResult p;
  p.name = std::move(name);
  p.residual = r.max;
  p.tol_hold = hold;
  p.tol_fail = fail;
  p.verdict = decide(r.max, hold, fail);
  p.witness = r.witness;
  return p;
}

Residual larger(const Residual& a, const Residual& b) { return b.max > a.max ? b : a; }

}  // namespace

ClassificationReport classify(const AConnection& conn, const ProbeSet& probes,
                              const Tolerances& tol) {
  tol.validate();
  const TensorCalculus calc(conn);
  const int jobs = probes.config.jobs;
  const Algebroid& alg = conn.algebroid();

  const Residual triple = measure(
      probes,
      [&](const ProbeBattery& b) {
        return ProbeExpression{calc.triple_bracket(X_of(b), Y_of(b), Z_of(b)),
                               {&X_of(b), &Y_of(b), &Z_of(b)}};
      },
      jobs);
  const Residual cyclic_triple = measure(
      probes,
      [&](const ProbeBattery& b) {
        auto tb = [&](const Section& a, const Section& c, const Section& d) {
          return calc.triple_bracket(a, c, d);
        };
        return ProbeExpression{cyclic(tb, X_of(b), Y_of(b), Z_of(b)),
                               {&X_of(b), &Y_of(b), &Z_of(b)}};
      },
      jobs);
  const Residual flat = measure(
      probes,
      [&](const ProbeBattery& b) {
        return ProbeExpression{calc.curvature(X_of(b), Y_of(b), Z_of(b)),
                               {&X_of(b), &Y_of(b), &Z_of(b)}};
      },
      jobs);

  Residual dual_flat;
  std::optional<TensorCalculus> bar;
  if (alg.has_bracket()) {
    bar.emplace(dual(conn));
    dual_flat = measure(
        probes,
        [&](const ProbeBattery& b) {
          return ProbeExpression{bar->curvature(X_of(b), Y_of(b), Z_of(b)),
                                 {&X_of(b), &Y_of(b), &Z_of(b)}};
        },
        jobs);
  } else {
    throw UnsupportedError("classification needs a section bracket on '" + alg.name() + "'");
  }

  const Residual torsion_free = measure(
      probes,
      [&](const ProbeBattery& b) {
        return ProbeExpression{calc.torsion(X_of(b), Y_of(b)), {&X_of(b), &Y_of(b)}};
      },
      jobs);
  const Residual parallel_torsion = measure(
      probes,
      [&](const ProbeBattery& b) {
        return ProbeExpression{calc.nabla_T(Z_of(b), X_of(b), Y_of(b)),
                               {&X_of(b), &Y_of(b), &Z_of(b)}};
      },
      jobs);
  const Residual parallel_curvature = measure(
      probes,
      [&](const ProbeBattery& b) {
        return ProbeExpression{calc.nabla_R(Z_of(b), X_of(b), Y_of(b), W_of(b)),
                               {&X_of(b), &Y_of(b), &Z_of(b), &W_of(b)}};
      },
      jobs);
  const Residual rho_torsion = check_rho_torsion(conn, probes);

  // Post-Lie conditions with the tensorial bracket [X, Y] := -T(X, Y).
  const Residual post_torsion = measure(
      probes,
      [&](const ProbeBattery& b) {
        const Section &X = X_of(b), &Y = Y_of(b), &Z = Z_of(b);
        auto br = [&](const Section& a, const Section& c) { return calc.torsion(a, c) * -1.0; };
        const Section lhs = calc.product(X, br(Y, Z));
        const Section rhs = br(calc.product(X, Y), Z) + br(Y, calc.product(X, Z));
        return ProbeExpression{lhs - rhs, {&X, &Y, &Z}};
      },
      jobs);
  const Residual post_curvature = measure(
      probes,
      [&](const ProbeBattery& b) {
        const Section &X = X_of(b), &Y = Y_of(b), &Z = Z_of(b);
        const Section lhs = calc.product(calc.torsion(X, Y) * -1.0, Z);
        return ProbeExpression{lhs - calc.triple_bracket(X, Y, Z), {&X, &Y, &Z}};
      },
      jobs);
  const Residual post_jacobi = measure(
      probes,
      [&](const ProbeBattery& b) {
        auto jac = [&](const Section& a, const Section& c, const Section& d) {
          return calc.torsion(a, calc.torsion(c, d));
        };
        return ProbeExpression{cyclic(jac, X_of(b), Y_of(b), Z_of(b)),
                               {&X_of(b), &Y_of(b), &Z_of(b)}};
      },
      jobs);

  ClassificationReport report;
  report.connection = conn.name();
  report.algebroid = alg.name();
  report.config = probes.config;
  report.tolerances = tol;

  const double hold = tol.tol_hold;
  const double hold_d = tol.tol_hold_derivative;
  const double fail = tol.tol_fail;
  const Residual post_direct = larger(larger(post_torsion, post_curvature), post_jacobi);

  report.predicates.push_back(make_result("lie_admissible", cyclic_triple, hold, fail));
  report.predicates.push_back(make_result("pre_lie", triple, hold, fail));
  report.predicates.push_back(make_result("post_lie", post_direct, hold_d, fail));
  report.predicates.push_back(make_result("flat", flat, hold, fail));
  report.predicates.push_back(make_result("dual_flat", dual_flat, hold, fail));
  report.predicates.push_back(make_result("torsion_free", torsion_free, hold, fail));
  report.predicates.push_back(make_result("parallel_torsion", parallel_torsion, hold_d, fail));
  report.predicates.push_back(make_result("parallel_curvature", parallel_curvature, hold_d, fail));
  report.predicates.push_back(
      make_result("invariant", larger(parallel_torsion, parallel_curvature), hold_d, fail));
  report.predicates.push_back(make_result("rho_torsion_free", rho_torsion, hold, fail));

  report.post_lie_via_curvature = make_result("post_lie_via_curvature", larger(flat, dual_flat), hold, fail);
  report.post_lie_agreement =
      report.post_lie_via_curvature.verdict == report.get("post_lie").verdict;
  return report;
}

std::vector<std::string> implication_violations(const ClassificationReport& report) {
  std::vector<std::string> out;
  auto holds = [&](const char* name) { return report.verdict(name) == Verdict::holds; };
  auto fails = [&](const char* name) { return report.verdict(name) == Verdict::fails; };
  if (holds("pre_lie") && fails("lie_admissible")) out.push_back("pre_lie => lie_admissible");
  if (holds("flat") && holds("torsion_free") && fails("pre_lie")) {
    out.push_back("flat & torsion_free => pre_lie");
  }
  if (holds("flat") && holds("parallel_torsion") && fails("post_lie")) {
    out.push_back("flat & parallel_torsion => post_lie");
  }
  if (holds("invariant") && !(holds("parallel_torsion") && holds("parallel_curvature"))) {
    out.push_back("invariant => parallel_torsion & parallel_curvature");
  }
  return out;
}

Residual check_rho_torsion(const AConnection& conn, const ProbeSet& probes) {
  const TensorCalculus calc(conn);
  const Algebroid& alg = conn.algebroid();
  return measure(
      probes,
      [&](const ProbeBattery& b) {
        return ProbeExpression{alg.anchor_section(calc.torsion(X_of(b), Y_of(b))),
                               {&X_of(b), &Y_of(b)}};
      },
      probes.config.jobs);
}

Residual check_commutator_is_jacobi_lie(const AConnection& conn, const ProbeSet& probes) {
  const Algebroid& alg = conn.algebroid();
  if (alg.kind() != AlgebroidKind::tangent) {
    throw InputError("commutator check needs a tangent algebroid, got '" + alg.name() + "' (" +
                     to_string(alg.kind()) + ")");
  }
  const Differentiator& diff = alg.diff();
  return measure(
      probes,
      [&](const ProbeBattery& b) {
        const Section &X = X_of(b), &Y = Y_of(b);
        const Section commutator = conn(X, Y) - conn(Y, X);
        return ProbeExpression{commutator - jacobi_lie_bracket(diff, X, Y), {&X, &Y}};
      },
      probes.config.jobs);
}

namespace {

TensorReport to_report(std::string id, const Residual& r, double tol) {
  TensorReport t;
  t.id = std::move(id);
  t.max_residual = r.max;
  t.mean_residual = r.mean;
  t.tolerance = tol;
  t.witness = r.witness;
  return t;
}

}  // namespace

std::vector<TensorReport> verify_identity_suite(const TensorCalculus& calc, const ProbeSet& probes,
                                                const IdentityTolerances& tol) {
  const TensorCalculus bar(dual(calc.connection()));
  const int jobs = probes.config.jobs;
  std::vector<TensorReport> out;

  auto R = [&](const Section& a, const Section& b, const Section& c) { return calc.curvature(a, b, c); };
  auto Rbar = [&](const Section& a, const Section& b, const Section& c) { return bar.curvature(a, b, c); };
  auto TT = [&](const Section& a, const Section& b, const Section& c) {
    return calc.torsion(a, calc.torsion(b, c));
  };

  out.push_back(to_report(
      "covariant_torsion",
      measure(
          probes,
          [&](const ProbeBattery& b) {
            const Section &X = X_of(b), &Y = Y_of(b), &Z = Z_of(b);
            const Section v = calc.nabla_T(Z, X, Y) - Rbar(X, Y, Z) - R(Y, Z, X) - R(Z, X, Y);
            return ProbeExpression{v, {&X, &Y, &Z}};
          },
          jobs),
      tol.covariant_torsion));

  out.push_back(to_report(
      "cyclic_torsion",
      measure(
          probes,
          [&](const ProbeBattery& b) {
            const Section &X = X_of(b), &Y = Y_of(b), &Z = Z_of(b);
            const Section v = cyclic(TT, X, Y, Z) - cyclic(R, X, Y, Z) - cyclic(Rbar, X, Y, Z);
            return ProbeExpression{v, {&X, &Y, &Z}};
          },
          jobs),
      tol.cyclic_torsion));

  out.push_back(to_report(
      "first_bianchi",
      measure(
          probes,
          [&](const ProbeBattery& b) {
            const Section &X = X_of(b), &Y = Y_of(b), &Z = Z_of(b);
            auto nT = [&](const Section& a, const Section& c, const Section& d) {
              return calc.nabla_T(a, c, d);
            };
            const Section v = cyclic(nT, X, Y, Z) - cyclic(R, X, Y, Z) - cyclic(TT, X, Y, Z);
            return ProbeExpression{v, {&X, &Y, &Z}};
          },
          jobs),
      tol.first_bianchi));

  out.push_back(to_report(
      "second_bianchi",
      measure(
          probes,
          [&](const ProbeBattery& b) {
            const Section &X = X_of(b), &Y = Y_of(b), &Z = Z_of(b), &W = W_of(b);
            auto nR = [&](const Section& a, const Section& c, const Section& d) {
              return calc.nabla_R(a, c, d, W);
            };
            auto RT = [&](const Section& a, const Section& c, const Section& d) {
              return calc.curvature(a, calc.torsion(c, d), W);
            };
            const Section v = cyclic(nR, X, Y, Z) - cyclic(RT, X, Y, Z);
            return ProbeExpression{v, {&X, &Y, &Z, &W}};
          },
          jobs),
      tol.second_bianchi));

  out.push_back(to_report(
      "triple_bracket",
      measure(
          probes,
          [&](const ProbeBattery& b) {
            const Section &X = X_of(b), &Y = Y_of(b), &Z = Z_of(b);
            const Section v = calc.triple_bracket(X, Y, Z) - R(X, Y, Z) +
                              calc.product(calc.torsion(X, Y), Z);
            return ProbeExpression{v, {&X, &Y, &Z}};
          },
          jobs),
      tol.triple_bracket));
  return out;
}

std::vector<TensorReport> verify_identity_suite(const AConnection& conn, const ProbeSet& probes,
                                                const IdentityTolerances& tol) {
  return verify_identity_suite(TensorCalculus(conn), probes, tol);
}

std::vector<TensorReport> tensoriality_residuals(const AConnection& conn, const ProbeSet& probes,
                                                 double tolerance) {
  const TensorCalculus calc(conn);
  const int n = conn.algebroid().num_vars();
  const Polynomial x1 = Polynomial::variable(n, 0);
  const SmoothScalar f(Polynomial::constant(n, 1.0) + x1 * x1);
  const int jobs = probes.config.jobs;
  std::vector<TensorReport> out;

  auto slot = [&](const std::string& id, auto fn) {
    out.push_back(to_report(id, measure(probes, fn, jobs), tolerance));
  };
  slot("R_first", [&](const ProbeBattery& b) {
    const Section &X = X_of(b), &Y = Y_of(b), &Z = Z_of(b);
    return ProbeExpression{calc.curvature(X.times(f), Y, Z) - calc.curvature(X, Y, Z).times(f),
                           {&X, &Y, &Z}};
  });
  slot("R_second", [&](const ProbeBattery& b) {
    const Section &X = X_of(b), &Y = Y_of(b), &Z = Z_of(b);
    return ProbeExpression{calc.curvature(X, Y.times(f), Z) - calc.curvature(X, Y, Z).times(f),
                           {&X, &Y, &Z}};
  });
  slot("R_third", [&](const ProbeBattery& b) {
    const Section &X = X_of(b), &Y = Y_of(b), &Z = Z_of(b);
    return ProbeExpression{calc.curvature(X, Y, Z.times(f)) - calc.curvature(X, Y, Z).times(f),
                           {&X, &Y, &Z}};
  });
  slot("T_first", [&](const ProbeBattery& b) {
    const Section &X = X_of(b), &Y = Y_of(b);
    return ProbeExpression{calc.torsion(X.times(f), Y) - calc.torsion(X, Y).times(f), {&X, &Y}};
  });
  slot("T_second", [&](const ProbeBattery& b) {
    const Section &X = X_of(b), &Y = Y_of(b);
    return ProbeExpression{calc.torsion(X, Y.times(f)) - calc.torsion(X, Y).times(f), {&X, &Y}};
  });
  return out;
}

}  // namespace alab
