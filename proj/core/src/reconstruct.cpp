#include "alab/reconstruct.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace alab {

std::string to_string(ReconstructionError::Code code) {
  using C = ReconstructionError::Code;
  switch (code) {
    case C::not_flat: return "not_flat";
    case C::path_dependent: return "path_dependent";
    case C::non_transitive: return "non_transitive";
    case C::degenerate_frame: return "degenerate_frame";
    case C::constancy_violated: return "constancy_violated";
    case C::unsupported_bundle: return "unsupported_bundle";
  }
  return "unknown";
}

namespace {

const EmbeddedManifold& base_of(const TMConnection& conn) { return conn.bundle->base(); }

// Velocity of t -> retract((1-t) a + t b), five-point stencil in t.
Vec path_velocity(const EmbeddedManifold& m, const Vec& a, const Vec& b, double t) {
  const double d = 1e-3;
  auto c = [&](double s) { return m.retract((1.0 - s) * a + s * b); };
  return (8.0 * (c(t + d) - c(t - d)) - (c(t + 2 * d) - c(t - 2 * d))) / (12.0 * d);
}

// Splits a -> b into legs whose retracted chords stay away from the
// singular set of the retraction (e.g. the origin for the sphere).
void plan_legs(const EmbeddedManifold& m, const Vec& a, const Vec& b, int depth,
               std::vector<Vec>& out) {
  const double chord = (b - a).norm();
  bool smooth = true;
  if (chord > 1e-14 && depth < 4) {
    Vec prev = a;
    const int samples = 16;
    for (int s = 1; s <= samples; ++s) {
      const Vec cur = m.retract((1.0 - double(s) / samples) * a + (double(s) / samples) * b);
      if (!cur.allFinite() || (cur - prev).norm() > 3.0 * chord / samples + 1e-12) {
        smooth = false;
        break;
      }
      prev = cur;
    }
  }
  if (smooth) {
    out.push_back(b);
    return;
  }
  // Push the midpoint off the chord along the coordinate direction in which
  // the chord is smallest.
  const Vec d = b - a;
  Eigen::Index axis = 0;
  d.cwiseAbs().minCoeff(&axis);
  Vec off = Vec::Unit(a.size(), axis);
  off -= d.dot(off) / std::max(d.squaredNorm(), 1e-300) * d;
  if (off.norm() < 1e-8) off = Vec::Unit(a.size(), (axis + 1) % a.size());
  off.normalize();
  const Vec mid = m.retract(0.5 * (a + b) + 0.5 * chord * off);
  plan_legs(m, a, mid, depth + 1, out);
  plan_legs(m, mid, b, depth + 1, out);
}

std::vector<Vec> plan_path(const EmbeddedManifold& m, const Vec& a, const Vec& b) {
  std::vector<Vec> nodes{a};
  plan_legs(m, a, b, 0, nodes);
  return nodes;
}

Mat transport_leg(const TMConnection& conn, const Vec& a, const Vec& b, int steps) {
  const EmbeddedManifold& m = base_of(conn);
  const int k = conn.bundle->fiber_dim();
  Mat P = Mat::Identity(k, k);
  if ((b - a).squaredNorm() == 0.0) return P;
  const double h = 1.0 / steps;
  auto A = [&](double t) -> Mat {
    const Vec x = m.retract((1.0 - t) * a + t * b);
    return -conn.coefficient(x, path_velocity(m, a, b, t));
  };
  Mat a0 = A(0.0);
  for (int s = 0; s < steps; ++s) {
    const double t = s * h;
    const Mat am = A(t + 0.5 * h);
    const Mat a1 = A(t + h);
    const Mat k1 = a0 * P;
    const Mat k2 = am * (P + 0.5 * h * k1);
    const Mat k3 = am * (P + 0.5 * h * k2);
    const Mat k4 = a1 * (P + h * k3);
    P += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    a0 = a1;
  }
  return P;
}

}  // namespace

Mat parallel_transport_fixed(const TMConnection& conn, const Vec& from, const Vec& to, int steps) {
  const std::vector<Vec> nodes = plan_path(base_of(conn), from, to);
  const int k = conn.bundle->fiber_dim();
  Mat P = Mat::Identity(k, k);
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
    P = transport_leg(conn, nodes[i], nodes[i + 1], steps) * P;
  }
  return P;
}

TransportResult parallel_transport(const TMConnection& conn, const Vec& from, const Vec& to,
                                   const TransportConfig& config) {
  if (config.initial_steps < 1) throw InputError("transport needs at least one step");
  TransportResult out;
  int steps = config.initial_steps;
  Mat prev = parallel_transport_fixed(conn, from, to, steps);
  while (true) {
    const int next = steps * 2;
    const Mat cur = parallel_transport_fixed(conn, from, to, next);
    out.change = (cur - prev).norm();
    out.propagator = cur;
    out.steps = next;
    if (out.change < config.tolerance || next * 2 > config.max_steps) break;
    prev = cur;
    steps = next;
  }
  if (!out.propagator.allFinite()) {
    throw NumericError("parallel transport diverged between " + format_vec(from) + " and " +
                       format_vec(to));
  }
  return out;
}

ProbeMax tm_curvature_residual(const TMConnection& conn, const std::vector<Vec>& points) {
  const Algebroid& bundle = *conn.bundle;
  const auto& manifold = bundle.base_ptr();
  const int n = manifold->ambient_dim();
  const int k = bundle.fiber_dim();
  std::vector<Section> fields;
  for (int i = 0; i < n; ++i) {
    fields.push_back(project_field(manifold, Section::constant(Vec::Unit(n, i), n)).field);
  }
  ProbeMax out;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const Section& U = fields[i];
      const Section& V = fields[j];
      const Section UV = jacobi_lie_bracket(bundle.diff(), U, V);
      for (int l = 0; l < k; ++l) {
        const Section Y = Section::constant(Vec::Unit(k, l), n);
        const Section F = conn.covariant(U, conn.covariant(V, Y)) -
                          conn.covariant(V, conn.covariant(U, Y)) - conn.covariant(UV, Y);
        for (const Vec& x : points) {
          const double r = F(x).norm();
          if (out.witness.size() == 0 || r > out.value) {
            out.value = r;
            out.witness = x;
          }
        }
      }
    }
  }
  return out;
}

ProbeMax loop_holonomy_residual(const TMConnection& conn, const TransportConfig& config) {
  const EmbeddedManifold& m = base_of(conn);
  std::mt19937_64 rng(config.seed + 17);
  std::normal_distribution<double> gauss;
  const int k = conn.bundle->fiber_dim();
  ProbeMax out;
  for (int l = 0; l < config.loops; ++l) {
    const Vec p = m.sample(rng);
    Vec u(m.ambient_dim()), w(m.ambient_dim());
    for (auto& c : u) c = gauss(rng);
    for (auto& c : w) c = gauss(rng);
    u = m.tangent_project(p, u);
    w = m.tangent_project(p, w);
    u *= config.loop_size / std::max(u.norm(), 1e-300);
    w *= config.loop_size / std::max(w.norm(), 1e-300);
    const Vec q = m.retract(p + u);
    const Vec r = m.retract(p + w);
    const Mat P = parallel_transport(conn, r, p, config).propagator *
                  parallel_transport(conn, q, r, config).propagator *
                  parallel_transport(conn, p, q, config).propagator;
    const double res = (P - Mat::Identity(k, k)).norm();
    if (out.witness.size() == 0 || res > out.value) {
      out.value = res;
      out.witness = p;
    }
  }
  return out;
}

Mat Frame::matrix(const Vec& x) const { return transport_from_base(x); }

Frame parallel_frame(const TMConnection& conn, const Vec& base_point,
                     const std::vector<Vec>& points, const TransportConfig& config) {
  const Algebroid& bundle = *conn.bundle;
  if (bundle.spec().fiber_projector) {
    throw ReconstructionError(ReconstructionError::Code::unsupported_bundle,
                              "parallel frames need an unconstrained trivialization");
  }
  if (!bundle.base().contains(base_point, 1e-9)) {
    throw InputError("frame base point " + format_vec(base_point) + " is not on " +
                     bundle.base().name());
  }
  Frame frame{conn, base_point, config.frame_steps, {}, {}, 0.0, 0.0, 0.0};

  const ProbeMax curvature = tm_curvature_residual(conn, points);
  frame.curvature_residual = curvature.value;
  if (curvature.value > config.flatness_tolerance) {
    throw ReconstructionError(ReconstructionError::Code::not_flat,
                              "connection not flat; reconstruction inapplicable (curvature " +
                                  std::to_string(curvature.value) + " at " +
                                  format_vec(curvature.witness) + ")",
                              curvature.witness);
  }

  const ProbeMax loops = loop_holonomy_residual(conn, config);
  frame.loop_residual = loops.value;
  if (loops.value > config.loop_tolerance) {
    throw ReconstructionError(ReconstructionError::Code::path_dependent,
                              "transport path-dependent (loop residual " +
                                  std::to_string(loops.value) + " near " +
                                  format_vec(loops.witness) + ")",
                              loops.witness);
  }

  const int k = bundle.fiber_dim();
  const int steps = config.frame_steps;
  frame.transport_from_base = [conn, base_point, steps](const Vec& x) -> Mat {
    return parallel_transport_fixed(conn, base_point, x, steps);
  };
  for (int i = 0; i < k; ++i) {
    frame.sections.emplace_back(
        k, [fn = frame.transport_from_base, i](const Vec& x) -> Vec { return fn(x).col(i); }, 0);
  }

  // Parallel sections: nabla_v e_i = 0 along tangent directions.
  std::mt19937_64 rng(config.seed + 29);
  std::normal_distribution<double> gauss;
  const auto& m = bundle.base();
  for (const Vec& x : points) {
    Vec v(m.ambient_dim());
    for (auto& c : v) c = gauss(rng);
    v = m.tangent_project(x, v);
    for (int i = 0; i < k; ++i) {
      frame.flatness_residual =
          std::max(frame.flatness_residual, conn.covariant(frame.sections[i], x, v).norm() /
                                                std::max(v.norm(), 1e-300));
    }
  }
  return frame;
}

ReconstructionResult structure_constants(const Frame& frame, const Algebroid& alg,
                                         const std::vector<Vec>& points,
                                         const TransportConfig& config, double abelian_tolerance) {
  if (!alg.has_bracket()) {
    throw UnsupportedError("structure constants need a section bracket on '" + alg.name() + "'");
  }
  const int k = frame.dim();
  if (k != alg.fiber_dim()) throw InputError("frame dimension does not match the algebroid");
  if (points.empty()) throw InputError("structure constants need probe points");

  std::vector<std::vector<Section>> brackets(k, std::vector<Section>(k));
  for (int i = 0; i < k; ++i) {
    for (int j = i + 1; j < k; ++j) brackets[i][j] = alg.bracket(frame.sections[i], frame.sections[j]);
  }

  // samples[p][(i*k + j)*k + l]
  std::vector<std::vector<double>> samples;
  for (const Vec& x : points) {
    const Mat E = frame.matrix(x);
    Eigen::JacobiSVD<Mat> svd(E);
    const double smin = svd.singularValues().minCoeff();
    if (smin < config.degenerate_tolerance) {
      throw ReconstructionError(ReconstructionError::Code::degenerate_frame,
                                "frame degenerate at " + format_vec(x) + " (min singular value " +
                                    std::to_string(smin) + ")",
                                x);
    }
    const auto lu = E.partialPivLu();
    std::vector<double> c(static_cast<std::size_t>(k) * k * k, 0.0);
    for (int i = 0; i < k; ++i) {
      for (int j = i + 1; j < k; ++j) {
        const Vec cij = lu.solve(brackets[i][j](x));
        for (int l = 0; l < k; ++l) {
          c[(i * k + j) * k + l] = cij[l];
          c[(j * k + i) * k + l] = -cij[l];
        }
      }
    }
    samples.push_back(std::move(c));
  }

  const std::size_t n = samples.front().size();
  std::vector<double> mean(n, 0.0);
  for (const auto& s : samples) {
    for (std::size_t q = 0; q < n; ++q) mean[q] += s[q];
  }
  for (double& v : mean) v /= static_cast<double>(samples.size());

  ReconstructionResult result;
  result.points = points;
  for (std::size_t p = 0; p < samples.size(); ++p) {
    for (std::size_t q = 0; q < n; ++q) {
      const double dev = std::abs(samples[p][q] - mean[q]);
      if (result.constancy_witness.size() == 0 || dev > result.constancy_residual) {
        result.constancy_residual = dev;
        result.constancy_witness = points[p];
      }
    }
  }

  std::vector<double> anti(n, 0.0);
  double largest = 0.0;
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      for (int l = 0; l < k; ++l) {
        const double v = 0.5 * (mean[(i * k + j) * k + l] - mean[(j * k + i) * k + l]);
        anti[(i * k + j) * k + l] = v;
        largest = std::max(largest, std::abs(v));
      }
    }
  }
  result.recovered = LieAlgebra("recovered", k, anti);
  result.jacobi_residual = verify_jacobi(result.recovered);
  result.abelian = largest <= abelian_tolerance;
  result.invariants = algebra_invariants(result.recovered, 1e-6);
  result.flatness_residual = frame.flatness_residual;
  result.loop_residual = frame.loop_residual;
  result.curvature_residual = frame.curvature_residual;
  return result;
}

void match_action(ReconstructionResult& result, const Frame& frame, const Algebroid& alg,
                  const Action& reference) {
  const int k = frame.dim();
  const int g = reference.algebra.dim();
  const int n = alg.num_vars();
  const auto& points = result.points;
  const int rows = static_cast<int>(points.size()) * n;

  // Stack: fields of the reference basis (rows x g), recovered fields (rows x k).
  Mat B(rows, g), R(rows, k);
  for (std::size_t p = 0; p < points.size(); ++p) {
    const Vec& x = points[p];
    const Mat E = frame.matrix(x);
    for (int a = 0; a < g; ++a) {
      B.block(p * n, a, n, 1) = reference.fundamental_field(Vec::Unit(g, a), x);
    }
    for (int i = 0; i < k; ++i) R.block(p * n, i, n, 1) = alg.anchor(E.col(i), x);
  }
  const Mat L = B.colPivHouseholderQr().solve(R);
  result.action_map = L;
  const double scale = std::max(R.cwiseAbs().maxCoeff(), 1e-300);
  result.action_match_residual = (B * L - R).cwiseAbs().maxCoeff() / scale;

  if (g == k) {
    double worst = 0.0;
    const double lscale = std::max(L.norm(), 1e-300);
    for (int i = 0; i < k; ++i) {
      for (int j = i + 1; j < k; ++j) {
        const Vec lhs = L * result.recovered.bracket(Vec::Unit(k, i), Vec::Unit(k, j));
        const Vec rhs = reference.algebra.bracket(L.col(i), L.col(j));
        worst = std::max(worst, (lhs - rhs).norm() / (lscale * lscale));
      }
    }
    result.homomorphism_residual = worst;
  } else {
    result.homomorphism_residual = std::numeric_limits<double>::infinity();
  }
}

ReconstructionResult reconstruct_action(const AlgebroidPtr& alg, const TMConnection& conn,
                                        const ReconstructOptions& options) {
  const TransportConfig& cfg = options.transport;
  if (conn.bundle->fiber_dim() != alg->fiber_dim()) {
    throw InputError("TM-connection fiber dimension does not match '" + alg->name() + "'");
  }
  if (!alg->transitive()) {
    throw ReconstructionError(
        ReconstructionError::Code::non_transitive,
        "algebroid '" + alg->name() + "' is not transitive: anchor rank " +
            std::to_string(alg->min_anchor_rank()) + " < " +
            std::to_string(alg->base().intrinsic_dim()) + " at " + format_vec(alg->rank_witness()),
        alg->rank_witness());
  }
  const std::vector<Vec> points = alg->base().sample_points(cfg.num_points, cfg.seed);
  const Vec base_point = options.base_point ? *options.base_point
                                            : alg->base().sample_points(1, cfg.seed + 1).front();
  const Frame frame = parallel_frame(conn, base_point, points, cfg);
  ReconstructionResult result = structure_constants(frame, *alg, points, cfg);
  if (result.constancy_residual > cfg.constancy_tolerance) {
    throw ReconstructionError(ReconstructionError::Code::constancy_violated,
                              "structure functions are not constant (deviation " +
                                  std::to_string(result.constancy_residual) + " at " +
                                  format_vec(result.constancy_witness) + ")",
                              result.constancy_witness);
  }
  if (options.reference) {
    match_action(result, frame, *alg, *options.reference);
  } else if (alg->action()) {
    match_action(result, frame, *alg, *alg->action());
  }
  result.frame = std::make_shared<const Frame>(frame);
  return result;
}

double round_trip_residual(const Frame& frame, const ReconstructionResult& result,
                           const Algebroid& alg, int batteries, std::uint64_t seed) {
  const int k = frame.dim();
  const Frame f = frame;
  Action recovered_action{
      "recovered", result.recovered, alg.base_ptr(),
      [f, &alg](const Vec& xi, const Vec& x) -> Vec { return alg.anchor(f.matrix(x) * xi, x); },
      {}};
  const AlgebroidPtr rec = make_action_algebroid(recovered_action, alg.diff().config());

  // Frame coordinates -> input fiber coordinates.
  auto to_input = [f, k](const Section& s) {
    return Section(k, [f, s](const Vec& x) -> Vec { return f.matrix(x) * s(x); }, s.fd_depth());
  };

  std::mt19937_64 rng(seed);
  double worst = 0.0;
  for (int b = 0; b < batteries; ++b) {
    const Section X = rec->random_section(rng, 1);
    const Section Y = rec->random_section(rng, 1);
    const Section bracket_rec = to_input(rec->bracket(X, Y));
    const Section bracket_in = alg.bracket(to_input(X), to_input(Y));
    const double scale = std::max(sup_norm(X, result.points) * sup_norm(Y, result.points), 1e-12);
    for (const Vec& x : result.points) {
      worst = std::max(worst, (bracket_rec(x) - bracket_in(x)).norm() / scale);
      const Vec anchor_rec = rec->anchor(X(x), x);
      const Vec anchor_in = alg.anchor(to_input(X)(x), x);
      worst = std::max(worst, (anchor_rec - anchor_in).norm() / std::max(sup_norm(X, result.points), 1e-12));
    }
  }
  return worst;
}

}  // namespace alab
