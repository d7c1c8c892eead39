#pragma once

#include "alab/polynomial.hpp"
#include "alab/section.hpp"
#include "alab/types.hpp"

#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <vector>

namespace alab {

/// Base manifold realized as a level set in R^N.
class EmbeddedManifold {
 public:
  virtual ~EmbeddedManifold() = default;

  virtual std::string name() const = 0;
  virtual int ambient_dim() const = 0;
  virtual int intrinsic_dim() const = 0;
  /// Residual vector, zero exactly on the manifold.
  virtual Vec constraint(const Vec& x) const = 0;
  /// Maps an ambient point near the manifold onto it; identity on it.
  virtual Vec retract(const Vec& y) const = 0;
  /// Orthogonal projection of an ambient vector onto T_x M.
  virtual Vec tangent_project(const Vec& x, const Vec& v) const = 0;
  /// Seeded ambient Gaussian followed by retraction.
  virtual Vec sample(std::mt19937_64& rng) const;

  std::vector<Vec> sample_points(int count, std::uint64_t seed) const;
  bool contains(const Vec& x, double tol = 1e-10) const;
  bool is_tangent(const Vec& x, const Vec& v, double tol = 1e-9) const;
};

using ManifoldPtr = std::shared_ptr<const EmbeddedManifold>;

/// Unit sphere in R^3, retraction x / |x|.
ManifoldPtr make_sphere2();
/// Product of two unit circles in R^4.
ManifoldPtr make_torus2();
/// SO(3) in R^9 (row-major 3x3), polar-decomposition retraction.
ManifoldPtr make_so3_group();
ManifoldPtr make_euclidean(int n);
/// sphere2, torus2, so3_group, euclideanN. Throws InputError otherwise.
ManifoldPtr make_manifold(const std::string& name);

/// Directional derivatives of sections along tangent vectors.
///
/// Polynomial sections are differentiated exactly in ambient coordinates; the
/// extension off the manifold is irrelevant because the direction is tangent.
/// Anything else is differenced centrally along the retracted line
/// t -> retract(x + t v), with step h1 for leaf expressions and h2 when the
/// expression already contains difference quotients.
class Differentiator {
 public:
  explicit Differentiator(ManifoldPtr manifold, DiffConfig config = {});

  const EmbeddedManifold& manifold() const { return *manifold_; }
  const ManifoldPtr& manifold_ptr() const { return manifold_; }
  const DiffConfig& config() const { return config_; }

  /// D F(x)[v]. Throws InputError if v is not tangent at x.
  Vec along(const Section& F, const Vec& x, const Vec& v) const;
  /// Same as `along` without the tangency check, for internal hot paths that
  /// construct tangent directions themselves.
  Vec along_unchecked(const Section& F, const Vec& x, const Vec& v) const;
  double along(const SmoothScalar& f, const Vec& x, const Vec& v) const;

  double step_for_depth(int fd_depth) const { return fd_depth == 0 ? config_.h1 : config_.h2; }
  /// fd_depth of D F.
  static int derivative_depth(const Section& F) {
    return F.polynomials() ? 0 : F.fd_depth() + 1;
  }

 private:
  ManifoldPtr manifold_;
  DiffConfig config_;
};

/// Ambient-valued field on M; `tangent` records that values lie in T_x M.
struct VectorField {
  Section field;
  bool tangent = true;
};

/// Tangent projection of an ambient polynomial field, as a section.
VectorField project_field(const ManifoldPtr& manifold, const Section& ambient);

/// Seeded ambient polynomial field of the given degree, tangent-projected.
VectorField random_tangent_field(const ManifoldPtr& manifold, int degree, std::mt19937_64& rng);

/// D F(x)[v] as a free function.
Vec directional_derivative(const Differentiator& diff, const Section& F, const Vec& x,
                           const Vec& v);

/// Jacobi-Lie bracket DY[X] - DX[Y], tangent-projected, at a point.
Vec jacobi_lie_bracket(const Differentiator& diff, const Section& X, const Section& Y,
                       const Vec& x);
/// The same bracket as a lazily evaluated section.
Section jacobi_lie_bracket(const Differentiator& diff, const Section& X, const Section& Y);

}  // namespace alab
