#include "alab/manifold.hpp"

#include <cmath>

namespace alab {

namespace {

class Sphere2 final : public EmbeddedManifold {
 public:
  std::string name() const override { return "sphere2"; }
  int ambient_dim() const override { return 3; }
  int intrinsic_dim() const override { return 2; }
  Vec constraint(const Vec& x) const override {
    Vec r(1);
    r[0] = x.squaredNorm() - 1.0;
    return r;
  }
  Vec retract(const Vec& y) const override {
    const double n = y.norm();
    if (n < 1e-12) throw NumericError("sphere2 retraction undefined at the origin");
    return y / n;
  }
  Vec tangent_project(const Vec& x, const Vec& v) const override {
    const Vec u = x.normalized();
    return v - u.dot(v) * u;
  }
};

class Torus2 final : public EmbeddedManifold {
 public:
  std::string name() const override { return "torus2"; }
  int ambient_dim() const override { return 4; }
  int intrinsic_dim() const override { return 2; }
  Vec constraint(const Vec& x) const override {
    Vec r(2);
    r[0] = x[0] * x[0] + x[1] * x[1] - 1.0;
    r[1] = x[2] * x[2] + x[3] * x[3] - 1.0;
    return r;
  }
  Vec retract(const Vec& y) const override {
    Vec out = y;
    for (int p = 0; p < 2; ++p) {
      const double n = std::hypot(y[2 * p], y[2 * p + 1]);
      if (n < 1e-12) throw NumericError("torus2 retraction undefined on a circle's axis");
      out[2 * p] /= n;
      out[2 * p + 1] /= n;
    }
    return out;
  }
  Vec tangent_project(const Vec& x, const Vec& v) const override {
    Vec out = v;
    for (int p = 0; p < 2; ++p) {
      const double n2 = x[2 * p] * x[2 * p] + x[2 * p + 1] * x[2 * p + 1];
      const double d = (x[2 * p] * v[2 * p] + x[2 * p + 1] * v[2 * p + 1]) / n2;
      out[2 * p] -= d * x[2 * p];
      out[2 * p + 1] -= d * x[2 * p + 1];
    }
    return out;
  }
};

Eigen::Matrix3d as_matrix(const Vec& x) {
  Eigen::Matrix3d m;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) m(r, c) = x[3 * r + c];
  }
  return m;
}

Vec as_vector(const Eigen::Matrix3d& m) {
  Vec x(9);
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) x[3 * r + c] = m(r, c);
  }
  return x;
}

class SO3Group final : public EmbeddedManifold {
 public:
  std::string name() const override { return "so3_group"; }
  int ambient_dim() const override { return 9; }
  int intrinsic_dim() const override { return 3; }
  Vec constraint(const Vec& x) const override {
    const Eigen::Matrix3d r = as_matrix(x);
    const Eigen::Matrix3d e = r.transpose() * r - Eigen::Matrix3d::Identity();
    Vec out(7);
    int k = 0;
    for (int i = 0; i < 3; ++i) {
      for (int j = i; j < 3; ++j) out[k++] = e(i, j);
    }
    out[6] = std::min(0.0, r.determinant());  // reject the other component
    return out;
  }
  Vec retract(const Vec& y) const override {
    Eigen::JacobiSVD<Eigen::Matrix3d> svd(as_matrix(y), Eigen::ComputeFullU | Eigen::ComputeFullV);
    Eigen::Matrix3d u = svd.matrixU();
    const Eigen::Matrix3d v = svd.matrixV();
    if ((u * v.transpose()).determinant() < 0.0) u.col(2) *= -1.0;
    return as_vector(u * v.transpose());
  }
  Vec tangent_project(const Vec& x, const Vec& v) const override {
    const Eigen::Matrix3d r = as_matrix(x);
    const Eigen::Matrix3d a = r.transpose() * as_matrix(v);
    return as_vector(r * (0.5 * (a - a.transpose())));
  }
};

class Euclidean final : public EmbeddedManifold {
 public:
  explicit Euclidean(int n) : n_(n) {}
  std::string name() const override { return "euclidean" + std::to_string(n_); }
  int ambient_dim() const override { return n_; }
  int intrinsic_dim() const override { return n_; }
  Vec constraint(const Vec&) const override { return Vec::Zero(0); }
  Vec retract(const Vec& y) const override { return y; }
  Vec tangent_project(const Vec&, const Vec& v) const override { return v; }

 private:
  int n_;
};

}  // namespace

Vec EmbeddedManifold::sample(std::mt19937_64& rng) const {
  std::normal_distribution<double> gauss;
  for (int attempt = 0; attempt < 100; ++attempt) {
    Vec y(ambient_dim());
    for (int i = 0; i < ambient_dim(); ++i) y[i] = gauss(rng);
    try {
      return retract(y);
    } catch (const NumericError&) {
      continue;
    }
  }
  throw NumericError(name() + ": could not sample a point");
}

std::vector<Vec> EmbeddedManifold::sample_points(int count, std::uint64_t seed) const {
  std::mt19937_64 rng(seed);
  std::vector<Vec> pts;
  pts.reserve(count);
  for (int i = 0; i < count; ++i) pts.push_back(sample(rng));
  return pts;
}

bool EmbeddedManifold::contains(const Vec& x, double tol) const {
  if (x.size() != ambient_dim()) return false;
  const Vec r = constraint(x);
  return r.size() == 0 || r.cwiseAbs().maxCoeff() <= tol;
}

bool EmbeddedManifold::is_tangent(const Vec& x, const Vec& v, double tol) const {
  return (tangent_project(x, v) - v).norm() <= tol * (1.0 + v.norm());
}

ManifoldPtr make_sphere2() { return std::make_shared<Sphere2>(); }
ManifoldPtr make_torus2() { return std::make_shared<Torus2>(); }
ManifoldPtr make_so3_group() { return std::make_shared<SO3Group>(); }
ManifoldPtr make_euclidean(int n) {
  if (n <= 0) throw InputError("euclidean space needs positive dimension");
  return std::make_shared<Euclidean>(n);
}

ManifoldPtr make_manifold(const std::string& name) {
  if (name == "sphere2") return make_sphere2();
  if (name == "torus2") return make_torus2();
  if (name == "so3_group") return make_so3_group();
  if (name.rfind("euclidean", 0) == 0 && name.size() > 9) {
    int n = 0;
    try {
      n = std::stoi(name.substr(9));
    } catch (const std::exception&) {
      n = 0;
    }
    if (n > 0 && n <= 16) return make_euclidean(n);
  }
  throw InputError("unknown manifold '" + name + "'");
}

Differentiator::Differentiator(ManifoldPtr manifold, DiffConfig config)
    : manifold_(std::move(manifold)), config_(config) {
  if (!manifold_) throw InputError("differentiator needs a manifold");
  if (!(config_.h1 > 0.0) || !(config_.h2 > 0.0)) {
    throw InputError("finite-difference steps must be positive");
  }
}

Vec Differentiator::along(const Section& F, const Vec& x, const Vec& v) const {
  if (!manifold_->is_tangent(x, v)) {
    throw InputError("direction " + format_vec(v) + " is not tangent to " + manifold_->name() +
                     " at " + format_vec(x));
  }
  return along_unchecked(F, x, v);
}

Vec Differentiator::along_unchecked(const Section& F, const Vec& x, const Vec& v) const {
  if (v.squaredNorm() == 0.0) return Vec::Zero(F.dim());
  if (F.polynomials()) return F.jacobian(x) * v;
  const double h = step_for_depth(F.fd_depth());
  auto at = [&](double t) { return F(manifold_->retract(x + t * v)); };
  if (config_.stencil == 4) {
    return (8.0 * (at(h) - at(-h)) - (at(2.0 * h) - at(-2.0 * h))) / (12.0 * h);
  }
  return (at(h) - at(-h)) / (2.0 * h);
}

double Differentiator::along(const SmoothScalar& f, const Vec& x, const Vec& v) const {
  if (!manifold_->is_tangent(x, v)) {
    throw InputError("direction " + format_vec(v) + " is not tangent to " + manifold_->name());
  }
  if (v.squaredNorm() == 0.0) return 0.0;
  if (f.polynomial()) return f.polynomial()->gradient(x).dot(v);
  const double h = config_.h1;
  auto at = [&](double t) { return f(manifold_->retract(x + t * v)); };
  if (config_.stencil == 4) {
    return (8.0 * (at(h) - at(-h)) - (at(2.0 * h) - at(-2.0 * h))) / (12.0 * h);
  }
  return (at(h) - at(-h)) / (2.0 * h);
}

VectorField project_field(const ManifoldPtr& manifold, const Section& ambient) {
  if (ambient.dim() != manifold->ambient_dim()) throw InputError("field dimension mismatch");
  if (manifold->intrinsic_dim() == manifold->ambient_dim()) return {ambient, true};
  Section s(ambient.dim(),
            [manifold, ambient](const Vec& x) -> Vec {
              return manifold->tangent_project(x, ambient(x));
            },
            ambient.fd_depth());
  return {s, true};
}

VectorField random_tangent_field(const ManifoldPtr& manifold, int degree, std::mt19937_64& rng) {
  std::vector<Polynomial> comps;
  for (int i = 0; i < manifold->ambient_dim(); ++i) {
    comps.push_back(Polynomial::random(manifold->ambient_dim(), degree, rng));
  }
  return project_field(manifold, Section::from_polynomials(std::move(comps)));
}

Vec directional_derivative(const Differentiator& diff, const Section& F, const Vec& x,
                           const Vec& v) {
  return diff.along(F, x, v);
}

Vec jacobi_lie_bracket(const Differentiator& diff, const Section& X, const Section& Y,
                       const Vec& x) {
  const Vec bx = diff.along(Y, x, X(x)) - diff.along(X, x, Y(x));
  return diff.manifold().tangent_project(x, bx);
}

Section jacobi_lie_bracket(const Differentiator& diff, const Section& X, const Section& Y) {
  const int depth = std::max(Differentiator::derivative_depth(X), Differentiator::derivative_depth(Y));
  return Section(
      X.dim(),
      [diff, X, Y](const Vec& x) -> Vec {
        const Vec bx = diff.along_unchecked(Y, x, X(x)) - diff.along_unchecked(X, x, Y(x));
        return diff.manifold().tangent_project(x, bx);
      },
      depth);
}

}  // namespace alab
