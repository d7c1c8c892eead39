#pragma once

#include "alab/lie_algebra.hpp"
#include "alab/manifold.hpp"
#include "alab/section.hpp"

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace alab {

/// Infinitesimal action xi -> xi_M of a Lie algebra on a manifold.
///
/// `fundamental_field` must be linear in xi and a homomorphism for the
/// Jacobi-Lie bracket [X, Y]_J = DY[X] - DX[Y]. For matrix-realized algebras
/// `group_act(g, y)` is the corresponding group action, so that
/// d/dt group_act(exp(t xi), y) at t = 0 equals xi_M(y).
struct Action {
  std::string name;
  LieAlgebra algebra;
  ManifoldPtr manifold;
  std::function<Vec(const Vec& xi, const Vec& x)> fundamental_field;
  std::function<Vec(const Mat& g, const Vec& y)> group_act;
};

/// so(3) on S^2 with xi_M(x) = x cross xi; group action y -> g^T y.
Action so3_sphere_action();
/// se(2) on R^2 with xi_M = minus the generator of the left action; group action by g^{-1}.
Action se2_plane_action();
/// R^2 on T^2 rotating each circle; realized by 4x4 block rotation generators.
Action abelian_torus_action();
/// so(3) on SO(3) by right multiplication R -> R g, xi_M(R) = R hat(xi).
Action so3_group_action();

/// Max relative residual of xi_M([e_i, e_j]) - [xi_M, xi_M]_J over basis
/// pairs and points. `witness` receives the worst point.
double action_homomorphism_residual(const Action& action, const Differentiator& diff,
                                    const std::vector<Vec>& points, Vec* witness = nullptr);

enum class AlgebroidKind { tangent, action, bundle_of_lie_algebras, gauge_transformed, custom };

std::string to_string(AlgebroidKind kind);

/// Anchored bundle A = M x R^k, optionally with a section bracket (a Lie
/// algebroid). Immutable after construction.
class Algebroid {
 public:
  using Anchor = std::function<Vec(const Vec& a, const Vec& x)>;
  using Bracket = std::function<Section(const Section&, const Section&)>;
  using Projector = std::function<Vec(const Vec& a, const Vec& x)>;

  struct Spec {
    std::string name;
    AlgebroidKind kind = AlgebroidKind::custom;
    Differentiator diff;
    int fiber_dim = 0;
    Anchor anchor;
    Bracket bracket;              // empty for a bare anchored bundle
    Projector fiber_projector;    // set when fibers are a constrained subspace (TM)
    std::optional<Action> action;
    std::uint64_t probe_seed = 20240611;
    int probe_points = 20;
  };

  explicit Algebroid(Spec spec);

  const std::string& name() const { return spec_.name; }
  AlgebroidKind kind() const { return spec_.kind; }
  const Differentiator& diff() const { return spec_.diff; }
  const EmbeddedManifold& base() const { return spec_.diff.manifold(); }
  const ManifoldPtr& base_ptr() const { return spec_.diff.manifold_ptr(); }
  int fiber_dim() const { return spec_.fiber_dim; }
  int num_vars() const { return base().ambient_dim(); }
  const std::optional<Action>& action() const { return spec_.action; }
  const Spec& spec() const { return spec_; }

  Vec anchor(const Vec& a, const Vec& x) const { return spec_.anchor(a, x); }
  /// N x k matrix of the anchor at x.
  Mat anchor_matrix(const Vec& x) const;
  /// x -> rho(X(x), x) as an ambient-valued section.
  Section anchor_section(const Section& X) const;

  bool has_bracket() const { return static_cast<bool>(spec_.bracket); }
  /// Throws UnsupportedError for a bare anchored bundle.
  Section bracket(const Section& X, const Section& Y) const;

  /// Projects fiber values onto the admissible subspace (identity unless the
  /// fibers are constrained, as for TM in ambient coordinates).
  Section admissible(const Section& X) const;
  Vec admissible(const Vec& a, const Vec& x) const;

  /// Polynomial components of the given degree with coefficients in [-1, 1],
  /// made admissible.
  Section random_section(std::mt19937_64& rng, int degree) const;

  bool transitive() const { return transitive_; }
  bool anchor_is_zero() const { return anchor_zero_; }
  /// Point where the anchor rank was smallest during the transitivity probe.
  const Vec& rank_witness() const { return rank_witness_; }
  int min_anchor_rank() const { return min_rank_; }

 private:
  Spec spec_;
  bool transitive_ = false;
  bool anchor_zero_ = false;
  int min_rank_ = 0;
  Vec rank_witness_;
};

using AlgebroidPtr = std::shared_ptr<const Algebroid>;

/// Numerical rank of the anchor at x: singular values above 1e-8 times the largest.
int anchor_rank(const Algebroid& alg, const Vec& x);

/// Action algebroid g x| M. Bracket
/// [X, Y](x) = [X(x), Y(x)]_g + DY[rho(X)](x) - DX[rho(Y)](x).
/// Throws ConstructionError when the homomorphism probe exceeds 1e-4.
AlgebroidPtr make_action_algebroid(Action action, DiffConfig config = {});

/// TM in ambient coordinates: identity anchor, Jacobi-Lie bracket.
AlgebroidPtr make_tangent_algebroid(ManifoldPtr manifold, DiffConfig config = {});

/// Trivial anchor, pointwise bracket with structure constants c(x) (k^3
/// entries, index (i*k + j)*k + l). Throws ConstructionError on a pointwise
/// Jacobi failure.
using ConstantsField = std::function<std::vector<double>(const Vec& x)>;
AlgebroidPtr make_bundle_of_lie_algebras(ManifoldPtr manifold, int fiber_dim,
                                         ConstantsField constants, DiffConfig config = {},
                                         std::string name = "bundle_of_lie_algebras");

/// Transports an algebroid through the fiberwise isomorphism a' = G(x) a:
/// rho'(a', x) = rho(G^{-1} a', x), [X', Y']' = G [G^{-1} X', G^{-1} Y'].
using GaugeField = std::function<Mat(const Vec& x)>;
AlgebroidPtr make_gauge_transformed(const AlgebroidPtr& base, GaugeField gauge, std::string name);

/// Same bundle and anchor, caller-supplied bracket (used for mutation fixtures).
AlgebroidPtr with_bracket(const AlgebroidPtr& alg, Algebroid::Bracket bracket, std::string name);

/// Max over points of |rho[X, Y] - [rho X, rho Y]_J| / (|X| |Y|), sup norms
/// over the same points.
double check_anchor_homomorphism(const Algebroid& alg, const Section& X, const Section& Y,
                                 const std::vector<Vec>& points);

/// Max over points of |[X, fY] - rho(X)[f] Y - f [X, Y]| / (|X| |Y| |f|).
double check_leibniz(const Algebroid& alg, const Section& X, const SmoothScalar& f,
                     const Section& Y, const std::vector<Vec>& points);

/// Cyclic Jacobi sum of the section bracket, relative to |X| |Y| |Z|.
double check_bracket_jacobi(const Algebroid& alg, const Section& X, const Section& Y,
                            const Section& Z, const std::vector<Vec>& points);

/// Random linearity probes of the anchor, relative.
double check_anchor_linearity(const Algebroid& alg, const std::vector<Vec>& points,
                              std::uint64_t seed);

/// Max tangency defect of anchor outputs.
double check_anchor_tangency(const Algebroid& alg, const std::vector<Vec>& points,
                             std::uint64_t seed);

}  // namespace alab
