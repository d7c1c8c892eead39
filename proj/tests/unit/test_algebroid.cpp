#include "alab/algebroid.hpp"
#include "alab/builtins.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

#include <map>

using namespace alab;
using alab::testing::Gen;
using alab::testing::cross3;
using alab::testing::for_all;

namespace {

const std::vector<std::string> kBuiltinAlgebroids = {
    "so3_sphere", "se2_plane",          "abelian_torus",     "so3_group",     "bla_sphere",
    "zero_anchor_sphere", "gauge_twisted_so3", "tangent_sphere2", "tangent_torus2"};

Section constant(const Vec& v, int num_vars) { return Section::constant(v, num_vars); }

}  // namespace

TEST(ActionAlgebroid, So3AnchorIsFundamentalField) {
  const AlgebroidPtr a = builtin_algebroid("so3_sphere");
  const Vec x = Vec::Unit(3, 0);
  EXPECT_LE((a->anchor(Vec::Unit(3, 2), x) - Vec(Vec::Unit(3, 1) * -1.0)).norm(), 1e-15);
  Gen gen(2);
  for (int t = 0; t < 20; ++t) {
    const Vec p = a->base().sample(gen.engine());
    const Vec xi = gen.vec(3);
    EXPECT_LE((a->anchor(xi, p) - cross3(p, xi)).norm(), 1e-14);
  }
}

TEST(ActionAlgebroid, ConstantSectionsBracketLikeTheAlgebra) {
  const AlgebroidPtr a = builtin_algebroid("so3_sphere");
  for_all(10, 55, [&](Gen& gen, int) {
    const Vec xi = gen.vec(3), eta = gen.vec(3);
    const Section b = a->bracket(constant(xi, 3), constant(eta, 3));
    for (const Vec& x : a->base().sample_points(5, 1)) {
      EXPECT_LE((b(x) - cross3(xi, eta)).norm(), 1e-12);
    }
  });
}

TEST(ActionAlgebroid, AntiHomomorphismIsRejected) {
  Action bad = so3_sphere_action();
  bad.name = "anti";
  bad.fundamental_field = [](const Vec& xi, const Vec& x) { return cross3(xi, x); };
  EXPECT_THROW(make_action_algebroid(bad), ConstructionError);
}

TEST(TangentAlgebroid, IdentityAnchorAndJacobiLieBracket) {
  const ManifoldPtr s2 = make_sphere2();
  const AlgebroidPtr t = make_tangent_algebroid(s2);
  EXPECT_TRUE(t->transitive());
  Gen gen(9);
  const Section X = random_tangent_field(s2, 2, gen.engine()).field;
  const Section Y = random_tangent_field(s2, 2, gen.engine()).field;
  const Section b = t->bracket(X, Y);
  const Differentiator diff(s2);
  for (const Vec& x : s2->sample_points(10, 4)) {
    const Vec v = s2->tangent_project(x, gen.vec(3));
    EXPECT_LE((t->anchor(v, x) - v).norm(), 1e-15);
    EXPECT_LE((b(x) - jacobi_lie_bracket(diff, X, Y, x)).norm(), 1e-12);
  }
}

TEST(BundleOfLieAlgebras, PointwiseBracketMatchesScaledCrossProduct) {
  const AlgebroidPtr b = bla_sphere();
  EXPECT_TRUE(b->anchor_is_zero());
  EXPECT_FALSE(b->transitive());
  for_all(5, 12, [&](Gen& gen, int) {
    const Section X = b->random_section(gen.engine(), 2);
    const Section Y = b->random_section(gen.engine(), 2);
    const Section br = b->bracket(X, Y);
    for (const Vec& x : b->base().sample_points(10, 6)) {
      const Vec expected = (1.0 + x[0] * x[0]) * cross3(X(x), Y(x));
      EXPECT_LE((br(x) - expected).norm(), 1e-13);
      EXPECT_EQ(b->anchor(X(x), x).norm(), 0.0);
    }
  });
}

TEST(BundleOfLieAlgebras, NonJacobiConstantsAreRejected) {
  Gen gen(4);
  std::vector<double> c(27, 0.0);
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j)
      for (int k = 0; k < 3; ++k) {
        const double v = gen.uniform(0.5, 2.0);
        c[(i * 3 + j) * 3 + k] = v;
        c[(j * 3 + i) * 3 + k] = -v;
      }
  EXPECT_THROW(make_bundle_of_lie_algebras(make_sphere2(), 3, [c](const Vec&) { return c; }),
               ConstructionError);
}

TEST(AnchorHomomorphism, HoldsForTangentAndAction) {
  const AlgebroidPtr t = builtin_algebroid("tangent_sphere2");
  const AlgebroidPtr a = builtin_algebroid("so3_sphere");
  for_all(3, 808, [&](Gen& gen, int) {
    const auto pts_t = t->base().sample_points(20, 5);
    EXPECT_LE(check_anchor_homomorphism(*t, t->random_section(gen.engine(), 2),
                                        t->random_section(gen.engine(), 2), pts_t),
              1e-6);
    EXPECT_LE(check_anchor_homomorphism(*a, a->random_section(gen.engine(), 2),
                                        a->random_section(gen.engine(), 2), pts_t),
              1e-5);
  });
}

TEST(AnchorHomomorphism, DetectsCorruptedBracket) {
  const AlgebroidPtr a = builtin_algebroid("so3_sphere");
  const LieAlgebra g = LieAlgebra::so3();
  const AlgebroidPtr corrupted = with_bracket(
      a,
      [a, g](const Section& X, const Section& Y) {
        const Section full = a->bracket(X, Y);
        const Section pointwise(3, [g, X, Y](const Vec& x) { return g.bracket(X(x), Y(x)); });
        return pointwise + (full - pointwise) * 1.1;
      },
      "corrupted");
  Gen gen(6);
  const Section X = a->random_section(gen.engine(), 2);
  const Section Y = a->random_section(gen.engine(), 2);
  EXPECT_GT(check_anchor_homomorphism(*corrupted, X, Y, a->base().sample_points(20, 5)), 1e-2);
}

TEST(Leibniz, ConstantLinearAndBundleCases) {
  const AlgebroidPtr a = builtin_algebroid("so3_sphere");
  const AlgebroidPtr b = bla_sphere();
  const auto pts = a->base().sample_points(20, 14);
  for_all(3, 91, [&](Gen& gen, int) {
    const Section X = a->random_section(gen.engine(), 2);
    const Section Y = a->random_section(gen.engine(), 2);
    EXPECT_LE(check_leibniz(*a, X, SmoothScalar(Polynomial::constant(3, 2.5)), Y, pts), 1e-12);
    EXPECT_LE(check_leibniz(*a, X, SmoothScalar(Polynomial::variable(3, 0)), Y, pts), 1e-5);
    const Section U = b->random_section(gen.engine(), 2);
    const Section V = b->random_section(gen.engine(), 2);
    const Polynomial f = Polynomial::variable(3, 1) * Polynomial::variable(3, 2);
    EXPECT_LE(check_leibniz(*b, U, SmoothScalar(f), V, pts), 1e-6);
  });
}

TEST(Builtins, JacobiAndHomomorphismOnEveryAlgebroid) {
  for (const std::string& name : kBuiltinAlgebroids) {
    const AlgebroidPtr a = builtin_algebroid(name);
    const auto pts = a->base().sample_points(10, 33);
    Gen gen(77);
    const Section X = a->random_section(gen.engine(), 2);
    const Section Y = a->random_section(gen.engine(), 2);
    const Section Z = a->random_section(gen.engine(), 2);
    EXPECT_LE(check_bracket_jacobi(*a, X, Y, Z, pts), 1e-4) << name;
    EXPECT_LE(check_anchor_homomorphism(*a, X, Y, pts), 1e-4) << name;
    EXPECT_LE(check_anchor_linearity(*a, pts, 3), 1e-10) << name;
    EXPECT_LE(check_anchor_tangency(*a, pts, 3), 1e-10) << name;
  }
}

TEST(Builtins, TransitivityFlags) {
  const std::map<std::string, bool> expected = {
      {"so3_sphere", true},  {"se2_plane", true},           {"abelian_torus", true},
      {"so3_group", true},   {"bla_sphere", false},         {"zero_anchor_sphere", false},
      {"tangent_sphere2", true}, {"gauge_twisted_so3", true}};
  for (const auto& [name, transitive] : expected) {
    EXPECT_EQ(builtin_algebroid(name)->transitive(), transitive) << name;
  }
  EXPECT_THROW(builtin_algebroid("no_such_algebroid"), InputError);
}

TEST(GaugeTransform, AnchorAndBracketAreConjugated) {
  const AlgebroidPtr base = builtin_algebroid("so3_sphere");
  const AlgebroidPtr twisted = builtin_algebroid("gauge_twisted_so3");
  Gen gen(8);
  const Section X = base->random_section(gen.engine(), 1);
  const Section Y = base->random_section(gen.engine(), 1);
  // Transport X, Y into the twisted frame and compare brackets.
  const Section Xt(3, [X](const Vec& x) { return Vec(gauge_matrix(x) * X(x)); });
  const Section Yt(3, [Y](const Vec& x) { return Vec(gauge_matrix(x) * Y(x)); });
  const Section bt = twisted->bracket(Xt, Yt);
  const Section b = base->bracket(X, Y);
  for (const Vec& x : base->base().sample_points(10, 2)) {
    EXPECT_LE((twisted->anchor(Xt(x), x) - base->anchor(X(x), x)).norm(), 1e-12);
    EXPECT_LE((bt(x) - gauge_matrix(x) * b(x)).norm(), 1e-6);
  }
}
