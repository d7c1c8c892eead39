#include "alab/algebroid.hpp"

#include <cmath>

namespace alab {

namespace {

constexpr double kHomomorphismTol = 1e-4;
constexpr double kRankRelTol = 1e-8;

Vec cross(const Vec& a, const Vec& b) {
  Vec c(3);
  c << a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0];
  return c;
}

Mat block_rotation_generator(int block) {
  Mat e = Mat::Zero(4, 4);
  e(2 * block, 2 * block + 1) = -1.0;
  e(2 * block + 1, 2 * block) = 1.0;
  return e;
}

double safe_scale(double s) { return s > 0.0 ? s : 1.0; }

}  // namespace

Action so3_sphere_action() {
  Action a{"so3_sphere", LieAlgebra::so3(), make_sphere2(), {}, {}};
  a.fundamental_field = [](const Vec& xi, const Vec& x) { return cross(x, xi); };
  a.group_act = [](const Mat& g, const Vec& y) -> Vec { return g.transpose() * y; };
  return a;
}

Action se2_plane_action() {
  Action a{"se2_plane", LieAlgebra::se2(), make_euclidean(2), {}, {}};
  a.fundamental_field = [](const Vec& xi, const Vec& p) {
    Vec v(2);
    v << xi[0] * p[1] - xi[1], -xi[0] * p[0] - xi[2];
    return v;
  };
  a.group_act = [](const Mat& g, const Vec& y) -> Vec {
    Vec h(3);
    h << y[0], y[1], 1.0;
    const Vec out = g.inverse() * h;
    return out.head(2) / out[2];
  };
  return a;
}

Action abelian_torus_action() {
  LieAlgebra alg("abelian2", 2, std::vector<double>(8, 0.0),
                 {block_rotation_generator(0), block_rotation_generator(1)});
  Action a{"abelian_torus", alg, make_torus2(), {}, {}};
  a.fundamental_field = [](const Vec& xi, const Vec& x) {
    Vec v(4);
    v << -xi[0] * x[1], xi[0] * x[0], -xi[1] * x[3], xi[1] * x[2];
    return v;
  };
  a.group_act = [](const Mat& g, const Vec& y) -> Vec { return g * y; };
  return a;
}

Action so3_group_action() {
  Action a{"so3_group", LieAlgebra::so3(), make_so3_group(), {}, {}};
  a.fundamental_field = [](const Vec& xi, const Vec& x) {
    const Mat r = Eigen::Map<const Eigen::Matrix<double, 3, 3, Eigen::RowMajor>>(x.data());
    Mat hat(3, 3);
    hat << 0, -xi[2], xi[1], xi[2], 0, -xi[0], -xi[1], xi[0], 0;
    const Mat rx = r * hat;
    Vec out(9);
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) out[3 * i + j] = rx(i, j);
    }
    return out;
  };
  a.group_act = [](const Mat& g, const Vec& y) -> Vec {
    const Mat r = Eigen::Map<const Eigen::Matrix<double, 3, 3, Eigen::RowMajor>>(y.data());
    const Mat rg = r * g;
    Vec out(9);
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) out[3 * i + j] = rg(i, j);
    }
    return out;
  };
  return a;
}

double action_homomorphism_residual(const Action& action, const Differentiator& diff,
                                    const std::vector<Vec>& points, Vec* witness) {
  const int n = action.algebra.dim();
  const int N = action.manifold->ambient_dim();
  std::vector<Section> fields;
  for (int i = 0; i < n; ++i) {
    const Vec e = action.algebra.basis_vector(i);
    fields.emplace_back(N, [ff = action.fundamental_field, e](const Vec& x) { return ff(e, x); });
  }
  std::vector<double> sup(n, 0.0);
  for (int i = 0; i < n; ++i) sup[i] = sup_norm(fields[i], points);
  double worst = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const Vec cij = action.algebra.bracket(action.algebra.basis_vector(i),
                                             action.algebra.basis_vector(j));
      const double scale = safe_scale(sup[i] * sup[j]);
      for (const auto& x : points) {
        const Vec lhs = action.fundamental_field(cij, x);
        const Vec rhs = jacobi_lie_bracket(diff, fields[i], fields[j], x);
        const double r = (lhs - rhs).norm() / scale;
        if (r > worst) {
          worst = r;
          if (witness) *witness = x;
        }
      }
    }
  }
  return worst;
}

std::string to_string(AlgebroidKind kind) {
  switch (kind) {
    case AlgebroidKind::tangent: return "tangent";
    case AlgebroidKind::action: return "action";
    case AlgebroidKind::bundle_of_lie_algebras: return "bundle_of_lie_algebras";
    case AlgebroidKind::gauge_transformed: return "gauge_transformed";
    case AlgebroidKind::custom: return "custom";
  }
  return "custom";
}

Algebroid::Algebroid(Spec spec) : spec_(std::move(spec)) {
  if (spec_.fiber_dim <= 0) throw InputError("algebroid '" + spec_.name + "': fiber_dim must be positive");
  if (!spec_.anchor) throw InputError("algebroid '" + spec_.name + "': anchor missing");
  const auto points = base().sample_points(spec_.probe_points, spec_.probe_seed);
  min_rank_ = spec_.fiber_dim + base().intrinsic_dim();
  anchor_zero_ = true;
  for (const auto& x : points) {
    const int r = anchor_rank(*this, x);
    if (r < min_rank_) {
      min_rank_ = r;
      rank_witness_ = x;
    }
    if (anchor_matrix(x).cwiseAbs().maxCoeff() != 0.0) anchor_zero_ = false;
  }
  transitive_ = min_rank_ == base().intrinsic_dim();
}

Mat Algebroid::anchor_matrix(const Vec& x) const {
  Mat m(num_vars(), fiber_dim());
  for (int i = 0; i < fiber_dim(); ++i) m.col(i) = anchor(Vec::Unit(fiber_dim(), i), x);
  return m;
}

int anchor_rank(const Algebroid& alg, const Vec& x) {
  const Mat m = alg.anchor_matrix(x);
  Eigen::JacobiSVD<Mat> svd(m);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv[0] == 0.0) return 0;
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv[i] > kRankRelTol * sv[0]) ++rank;
  }
  return rank;
}

Section Algebroid::anchor_section(const Section& X) const {
  return Section(num_vars(),
                 [anchor = spec_.anchor, X](const Vec& x) -> Vec { return anchor(X(x), x); },
                 X.fd_depth());
}

Section Algebroid::bracket(const Section& X, const Section& Y) const {
  if (!has_bracket()) {
    throw UnsupportedError("anchored bundle '" + name() + "' has no section bracket");
  }
  return spec_.bracket(X, Y);
}

Section Algebroid::admissible(const Section& X) const {
  if (!spec_.fiber_projector) return X;
  return Section(X.dim(),
                 [proj = spec_.fiber_projector, X](const Vec& x) -> Vec { return proj(X(x), x); },
                 X.fd_depth());
}

Vec Algebroid::admissible(const Vec& a, const Vec& x) const {
  return spec_.fiber_projector ? spec_.fiber_projector(a, x) : a;
}

Section Algebroid::random_section(std::mt19937_64& rng, int degree) const {
  std::vector<Polynomial> comps;
  for (int i = 0; i < fiber_dim(); ++i) comps.push_back(Polynomial::random(num_vars(), degree, rng));
  return admissible(Section::from_polynomials(std::move(comps)));
}

AlgebroidPtr make_action_algebroid(Action action, DiffConfig config) {
  if (!action.fundamental_field || !action.manifold) {
    throw InputError("action '" + action.name + "' is incomplete");
  }
  Differentiator diff(action.manifold, config);
  const auto points = action.manifold->sample_points(20, 7001);
  Vec witness;
  const double residual = action_homomorphism_residual(action, diff, points, &witness);
  if (residual > kHomomorphismTol) {
    // Distinguish the common sign slip xi_M <-> -xi_M.
    Action flipped = action;
    flipped.fundamental_field = [ff = action.fundamental_field](const Vec& xi, const Vec& x) {
      return Vec(-ff(xi, x));
    };
    const double flipped_residual = action_homomorphism_residual(flipped, diff, points);
    std::string what = flipped_residual <= kHomomorphismTol ? "anti-homomorphism detected"
                                                            : "not a Lie algebra homomorphism";
    throw ConstructionError("action '" + action.name + "': " + what + " (max residual " +
                            std::to_string(residual) + " at " + format_vec(witness) + ")");
  }
  const LieAlgebra alg = action.algebra;
  const int k = alg.dim();
  Algebroid::Spec spec{action.name, AlgebroidKind::action, diff, k, {}, {}, {}, action};
  spec.anchor = action.fundamental_field;
  spec.bracket = [alg, diff, ff = action.fundamental_field](const Section& X, const Section& Y) {
    const int depth = std::max(Differentiator::derivative_depth(X), Differentiator::derivative_depth(Y));
    return Section(
        alg.dim(),
        [alg, diff, ff, X, Y](const Vec& x) -> Vec {
          const Vec xv = X(x);
          const Vec yv = Y(x);
          return alg.bracket(xv, yv) + diff.along_unchecked(Y, x, ff(xv, x)) -
                 diff.along_unchecked(X, x, ff(yv, x));
        },
        depth);
  };
  return std::make_shared<Algebroid>(std::move(spec));
}

AlgebroidPtr make_tangent_algebroid(ManifoldPtr manifold, DiffConfig config) {
  Differentiator diff(manifold, config);
  const int n = manifold->ambient_dim();
  Algebroid::Spec spec{"tangent_" + manifold->name(), AlgebroidKind::tangent, diff, n, {}, {}, {}, {}};
  spec.anchor = [manifold](const Vec& a, const Vec& x) { return manifold->tangent_project(x, a); };
  spec.bracket = [diff](const Section& X, const Section& Y) { return jacobi_lie_bracket(diff, X, Y); };
  if (manifold->intrinsic_dim() != n) {
    spec.fiber_projector = [manifold](const Vec& a, const Vec& x) {
      return manifold->tangent_project(x, a);
    };
  }
  return std::make_shared<Algebroid>(std::move(spec));
}

AlgebroidPtr make_bundle_of_lie_algebras(ManifoldPtr manifold, int fiber_dim,
                                         ConstantsField constants, DiffConfig config,
                                         std::string name) {
  const int k = fiber_dim;
  for (const auto& x : manifold->sample_points(20, 7003)) {
    std::vector<double> c = constants(x);
    try {
      LieAlgebra fiber("fiber", k, std::move(c));
      const double r = verify_jacobi(fiber);
      if (r > 1e-10) {
        throw ConstructionError("bundle of Lie algebras '" + name +
                                "': pointwise Jacobi failure (residual " + std::to_string(r) +
                                ") at " + format_vec(x));
      }
    } catch (const InputError& e) {
      throw ConstructionError("bundle of Lie algebras '" + name + "': " + e.what() + " at " +
                              format_vec(x));
    }
  }
  Differentiator diff(manifold, config);
  Algebroid::Spec spec{std::move(name), AlgebroidKind::bundle_of_lie_algebras, diff, k, {}, {}, {}, {}};
  const int n = manifold->ambient_dim();
  spec.anchor = [n](const Vec&, const Vec&) { return Vec(Vec::Zero(n)); };
  spec.bracket = [constants, k](const Section& X, const Section& Y) {
    return Section(
        k,
        [constants, k, X, Y](const Vec& x) -> Vec {
          const std::vector<double> c = constants(x);
          const Vec a = X(x);
          const Vec b = Y(x);
          Vec out = Vec::Zero(k);
          for (int i = 0; i < k; ++i) {
            for (int j = 0; j < k; ++j) {
              const double ab = a[i] * b[j];
              for (int l = 0; l < k; ++l) out[l] += ab * c[(i * k + j) * k + l];
            }
          }
          return out;
        },
        combined_depth({&X, &Y}));
  };
  return std::make_shared<Algebroid>(std::move(spec));
}

AlgebroidPtr make_gauge_transformed(const AlgebroidPtr& base, GaugeField gauge, std::string name) {
  Algebroid::Spec spec = base->spec();
  spec.name = std::move(name);
  spec.kind = AlgebroidKind::gauge_transformed;
  spec.action.reset();
  const int k = base->fiber_dim();
  auto untwist = [gauge, k](const Section& X) {
    return Section(k, [gauge, X](const Vec& x) -> Vec { return gauge(x).lu().solve(X(x)); },
                   X.fd_depth());
  };
  spec.anchor = [base, gauge](const Vec& a, const Vec& x) {
    return base->anchor(gauge(x).lu().solve(a), x);
  };
  if (base->has_bracket()) {
    spec.bracket = [base, gauge, untwist, k](const Section& X, const Section& Y) {
      const Section inner = base->bracket(untwist(X), untwist(Y));
      return Section(k, [gauge, inner](const Vec& x) -> Vec { return gauge(x) * inner(x); },
                     inner.fd_depth());
    };
  }
  if (base->spec().fiber_projector) {
    throw UnsupportedError("gauge transformation of constrained fibers is not supported");
  }
  return std::make_shared<Algebroid>(std::move(spec));
}

AlgebroidPtr with_bracket(const AlgebroidPtr& alg, Algebroid::Bracket bracket, std::string name) {
  Algebroid::Spec spec = alg->spec();
  spec.name = std::move(name);
  spec.kind = AlgebroidKind::custom;
  spec.bracket = std::move(bracket);
  return std::make_shared<Algebroid>(std::move(spec));
}

double check_anchor_homomorphism(const Algebroid& alg, const Section& X, const Section& Y,
                                 const std::vector<Vec>& points) {
  const Section rho_bracket = alg.anchor_section(alg.bracket(X, Y));
  const Section rx = alg.anchor_section(X);
  const Section ry = alg.anchor_section(Y);
  const double scale = safe_scale(sup_norm(X, points) * sup_norm(Y, points));
  double worst = 0.0;
  for (const auto& x : points) {
    const Vec jl = jacobi_lie_bracket(alg.diff(), rx, ry, x);
    worst = std::max(worst, (rho_bracket(x) - jl).norm() / scale);
  }
  return worst;
}

double check_leibniz(const Algebroid& alg, const Section& X, const SmoothScalar& f,
                     const Section& Y, const std::vector<Vec>& points) {
  const Section fy = Y.times(f);
  const Section lhs = alg.bracket(X, fy);
  const Section xy = alg.bracket(X, Y);
  double fsup = 0.0;
  for (const auto& x : points) fsup = std::max(fsup, std::abs(f(x)));
  const double scale = safe_scale(sup_norm(X, points) * sup_norm(Y, points) * std::max(fsup, 1.0));
  double worst = 0.0;
  for (const auto& x : points) {
    const Vec rx = alg.anchor(X(x), x);
    const Vec rhs = alg.diff().along(f, x, rx) * Y(x) + f(x) * xy(x);
    worst = std::max(worst, (lhs(x) - rhs).norm() / scale);
  }
  return worst;
}

double check_bracket_jacobi(const Algebroid& alg, const Section& X, const Section& Y,
                            const Section& Z, const std::vector<Vec>& points) {
  const Section a = alg.bracket(X, alg.bracket(Y, Z));
  const Section b = alg.bracket(Y, alg.bracket(Z, X));
  const Section c = alg.bracket(Z, alg.bracket(X, Y));
  const double scale =
      safe_scale(sup_norm(X, points) * sup_norm(Y, points) * sup_norm(Z, points));
  double worst = 0.0;
  for (const auto& x : points) worst = std::max(worst, (a(x) + b(x) + c(x)).norm() / scale);
  return worst;
}

double check_anchor_linearity(const Algebroid& alg, const std::vector<Vec>& points,
                              std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double worst = 0.0;
  for (const auto& x : points) {
    Vec a(alg.fiber_dim()), b(alg.fiber_dim());
    for (int i = 0; i < alg.fiber_dim(); ++i) {
      a[i] = u(rng);
      b[i] = u(rng);
    }
    a = alg.admissible(a, x);
    b = alg.admissible(b, x);
    const double s = 3.0 * u(rng);
    const Vec lhs = alg.anchor(s * a + b, x);
    const Vec rhs = s * alg.anchor(a, x) + alg.anchor(b, x);
    worst = std::max(worst, (lhs - rhs).norm() / (1.0 + rhs.norm()));
  }
  return worst;
}

double check_anchor_tangency(const Algebroid& alg, const std::vector<Vec>& points,
                             std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double worst = 0.0;
  for (const auto& x : points) {
    Vec a(alg.fiber_dim());
    for (int i = 0; i < alg.fiber_dim(); ++i) a[i] = u(rng);
    const Vec v = alg.anchor(alg.admissible(a, x), x);
    worst = std::max(worst, (alg.base().tangent_project(x, v) - v).norm() / (1.0 + v.norm()));
  }
  return worst;
}

}  // namespace alab
