#include "alab/manifold.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

using namespace alab;
using alab::testing::Gen;
using alab::testing::for_all;

namespace {

std::vector<ManifoldPtr> builtins() {
  return {make_sphere2(), make_torus2(), make_so3_group(), make_euclidean(2), make_euclidean(3)};
}

Mat constraint_jacobian(const EmbeddedManifold& m, const Vec& x) {
  const double h = 1e-5;
  const Vec c0 = m.constraint(x);
  Mat J(c0.size(), x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Vec e = Vec::Zero(x.size());
    e[i] = h;
    J.col(i) = (m.constraint(x + e) - m.constraint(x - e)) / (2 * h);
  }
  return J;
}

// Richardson-extrapolated central difference of t -> F(retract(x + t v)).
Vec richardson(const EmbeddedManifold& m, const Section& F, const Vec& x, const Vec& v, double h) {
  auto D = [&](double s) {
    return Vec((F(m.retract(x + s * v)) - F(m.retract(x - s * v))) / (2 * s));
  };
  return (4.0 * D(h / 2) - D(h)) / 3.0;
}

Section scalar_closure(int n, std::function<double(const Vec&)> f) {
  return Section(1, [f](const Vec& x) { return Vec::Constant(1, f(x)); });
}

}  // namespace

TEST(Manifold, SamplesSatisfyConstraint) {
  for (const auto& m : builtins()) {
    for (const Vec& x : m->sample_points(20, 99)) {
      EXPECT_LE(m->constraint(x).norm(), 1e-12) << m->name();
      EXPECT_LE((m->retract(x) - x).norm(), 1e-12) << m->name();
    }
  }
}

TEST(Manifold, TangentProjectionIsIdempotentAndTangent) {
  for (const auto& m : builtins()) {
    Gen gen(5);
    for (const Vec& x : m->sample_points(10, 3)) {
      const Mat J = constraint_jacobian(*m, x);
      for (int t = 0; t < 5; ++t) {
        const Vec v = gen.vec(m->ambient_dim());
        const Vec p = m->tangent_project(x, v);
        EXPECT_LE((m->tangent_project(x, p) - p).norm(), 1e-12) << m->name();
        if (J.rows() > 0) EXPECT_LE((J * p).norm(), 1e-10 * std::max(1.0, v.norm())) << m->name();
        EXPECT_LE(p.norm(), (1.0 + 1e-12) * v.norm()) << m->name();
      }
    }
  }
}

TEST(Manifold, TangentProjectionIsLinear) {
  for (const auto& m : builtins()) {
    Gen gen(8);
    const Vec x = m->sample_points(1, 12).front();
    const Vec a = gen.vec(m->ambient_dim()), b = gen.vec(m->ambient_dim());
    const double s = gen.uniform();
    const Vec lhs = m->tangent_project(x, a + s * b);
    const Vec rhs = m->tangent_project(x, a) + s * m->tangent_project(x, b);
    EXPECT_LE((lhs - rhs).norm(), 1e-12) << m->name();
  }
}

TEST(Manifold, IntrinsicDimensions) {
  EXPECT_EQ(make_sphere2()->intrinsic_dim(), 2);
  EXPECT_EQ(make_torus2()->intrinsic_dim(), 2);
  EXPECT_EQ(make_so3_group()->intrinsic_dim(), 3);
  EXPECT_EQ(make_so3_group()->ambient_dim(), 9);
  EXPECT_THROW(make_manifold("sphere3"), InputError);
  EXPECT_EQ(make_manifold("euclidean4")->ambient_dim(), 4);
}

TEST(DirectionalDerivative, ConstantAndLinear) {
  const ManifoldPtr s2 = make_sphere2();
  const Differentiator diff(s2);
  const Vec x = Vec::Unit(3, 2);
  const Vec v = Vec::Unit(3, 0);
  const Section c = Section::constant(Vec::Constant(2, 3.5), 3);
  EXPECT_EQ(directional_derivative(diff, c, x, v).norm(), 0.0);
  const Section x1 = Section::from_polynomials({Polynomial::variable(3, 0)});
  EXPECT_NEAR(directional_derivative(diff, x1, x, v)[0], 1.0, 1e-15);
  // The same linear function as a closure goes through the difference stencil.
  const Section x1c = scalar_closure(3, [](const Vec& y) { return y[0]; });
  EXPECT_NEAR(directional_derivative(diff, x1c, x, v)[0], 1.0, 1e-9);
}

TEST(DirectionalDerivative, ProductMatchesRichardsonOracle) {
  const ManifoldPtr s2 = make_sphere2();
  const Differentiator diff(s2);
  const Section poly = Section::from_polynomials(
      {Polynomial::variable(3, 0) * Polynomial::variable(3, 1)});
  const Section closure = scalar_closure(3, [](const Vec& y) { return y[0] * y[1]; });
  for_all(20, 404, [&](Gen& gen, int) {
    const Vec x = s2->sample(gen.engine());
    const Vec v = s2->tangent_project(x, gen.vec(3));
    const Vec oracle = richardson(*s2, closure, x, v, 1e-3);
    EXPECT_LE((directional_derivative(diff, poly, x, v) - oracle).norm(), 1e-8);
    EXPECT_LE((directional_derivative(diff, closure, x, v) - oracle).norm(), 1e-8);
  });
}

TEST(DirectionalDerivative, RejectsNonTangentDirection) {
  const Differentiator diff(make_sphere2());
  const Section x1 = Section::from_polynomials({Polynomial::variable(3, 0)});
  const Vec x = Vec::Unit(3, 2);
  EXPECT_THROW(directional_derivative(diff, x1, x, Vec::Unit(3, 2)), InputError);
}

TEST(JacobiLieBracket, SelfBracketVanishes) {
  const ManifoldPtr s2 = make_sphere2();
  const Differentiator diff(s2);
  Gen gen(1);
  const VectorField X = random_tangent_field(s2, 2, gen.engine());
  for (const Vec& x : s2->sample_points(10, 2)) {
    EXPECT_LE(jacobi_lie_bracket(diff, X.field, X.field, x).norm(), 1e-12);
  }
}

TEST(JacobiLieBracket, LinearFieldsGiveMatrixCommutator) {
  const ManifoldPtr s2 = make_sphere2();
  const Differentiator diff(s2);
  for_all(5, 11, [&](Gen& gen, int) {
    const Mat A = alab::testing::hat3(gen.vec(3));
    const Mat B = alab::testing::hat3(gen.vec(3));
    auto linear = [](const Mat& M) {
      std::vector<Polynomial> comps;
      for (int r = 0; r < 3; ++r) {
        Polynomial p(3);
        for (int c = 0; c < 3; ++c) p = p + Polynomial::variable(3, c) * M(r, c);
        comps.push_back(p);
      }
      return Section::from_polynomials(comps);
    };
    const Section X = linear(A), Y = linear(B);
    for (const Vec& x : s2->sample_points(10, 5)) {
      const Vec expected = (B * A - A * B) * x;
      EXPECT_LE((jacobi_lie_bracket(diff, X, Y, x) - expected).norm(), 1e-12);
    }
  });
}

TEST(JacobiLieBracket, ActsAsCommutatorOfDerivations) {
  const ManifoldPtr s2 = make_sphere2();
  const Differentiator diff(s2);
  Gen gen(31);
  const Section X = random_tangent_field(s2, 2, gen.engine()).field;
  const Section Y = random_tangent_field(s2, 2, gen.engine()).field;
  const Polynomial f = Polynomial::variable(3, 0) * Polynomial::variable(3, 1);
  // X[f] as a closure, differentiated along Y by the Richardson oracle.
  auto deriv = [&](const Section& V) {
    return scalar_closure(3, [f, V](const Vec& y) { return f.gradient(y).dot(V(y)); });
  };
  const Section Xf = deriv(X), Yf = deriv(Y);
  const Section bracket = jacobi_lie_bracket(diff, X, Y);
  for (const Vec& x : s2->sample_points(20, 8)) {
    const double lhs = f.gradient(x).dot(bracket(x));
    const double rhs = richardson(*s2, Yf, x, X(x), 1e-3)[0] - richardson(*s2, Xf, x, Y(x), 1e-3)[0];
    EXPECT_NEAR(lhs, rhs, 1e-6);
  }
}

TEST(JacobiLieBracket, JacobiIdentityOnRandomFields) {
  const ManifoldPtr s2 = make_sphere2();
  const Differentiator diff(s2);
  const auto points = s2->sample_points(20, 19);
  for_all(3, 2024, [&](Gen& gen, int) {
    const Section X = random_tangent_field(s2, 2, gen.engine()).field;
    const Section Y = random_tangent_field(s2, 2, gen.engine()).field;
    const Section Z = random_tangent_field(s2, 2, gen.engine()).field;
    const Section cyc = jacobi_lie_bracket(diff, X, jacobi_lie_bracket(diff, Y, Z)) +
                        jacobi_lie_bracket(diff, Y, jacobi_lie_bracket(diff, Z, X)) +
                        jacobi_lie_bracket(diff, Z, jacobi_lie_bracket(diff, X, Y));
    const double scale = sup_norm(X, points) * sup_norm(Y, points) * sup_norm(Z, points);
    EXPECT_LE(sup_norm(cyc, points) / scale, 1e-5);
  });
}

TEST(JacobiLieBracket, LeibnizRule) {
  const ManifoldPtr s2 = make_sphere2();
  const Differentiator diff(s2);
  const auto points = s2->sample_points(20, 21);
  Gen gen(3);
  const Section X = random_tangent_field(s2, 2, gen.engine()).field;
  const Section Y = random_tangent_field(s2, 2, gen.engine()).field;
  const Polynomial fp = Polynomial::constant(3, 1.0) + Polynomial::variable(3, 0) * Polynomial::variable(3, 2);
  const SmoothScalar f(fp);
  const Section lhs = jacobi_lie_bracket(diff, X, Y.times(f));
  const Section bracket = jacobi_lie_bracket(diff, X, Y);
  double worst = 0.0;
  for (const Vec& x : points) {
    const Vec rhs = fp.gradient(x).dot(X(x)) * Y(x) + fp(x) * bracket(x);
    worst = std::max(worst, (lhs(x) - rhs).norm());
  }
  EXPECT_LE(worst / (sup_norm(X, points) * sup_norm(Y, points)), 1e-6);
}
