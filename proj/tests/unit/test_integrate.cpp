#include "alab/integrate.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

using namespace alab;
using alab::testing::Gen;
using alab::testing::for_all;

namespace {

Vec default_start() { return sphere_test_problem().y0; }

/// y(t) = exp(-t hat(a)) y0 solves y' = y x a.
Vec constant_solution(const Vec& a, const Vec& y0, double t) {
  return alab::testing::exp_series(-t * alab::testing::hat3(a), 60) * y0;
}

ActionODE commuting_problem() {
  ActionODE p = sphere_test_problem();
  p.name = "commuting";
  const Vec a = (Vec(3) << 0.3, -0.8, 0.5).finished();
  p.coefficients = [a](const Vec& y) { return Vec((1.0 + 0.5 * y[2] + y[0] * y[1]) * a); };
  return p;
}

Vec ambient_reference(const ActionODE& p, double h) {
  Vec y = p.y0;
  const int n = static_cast<int>(std::lround(p.horizon / h));
  for (int i = 0; i < n; ++i) y = rk4_ambient_step(p, y, h);
  return y.normalized();
}

}  // namespace

TEST(Steppers, ZeroStepIsIdentity) {
  const ActionODE p = sphere_test_problem();
  const Vec y = default_start();
  EXPECT_EQ(lie_euler_step(p, y, 0.0), y);
  EXPECT_LE((rkmk4_step(p, y, 0.0) - y).norm(), 1e-16);
  EXPECT_EQ(rk4_ambient_step(p, y, 0.0), y);
}

TEST(Steppers, ConstantCoefficientsAreIntegratedExactly) {
  for_all(5, 101, [](Gen& gen, int) {
    const Vec a = gen.vec(3, -2.0, 2.0);
    const Vec y0 = gen.unit(3);
    const ActionODE p = constant_sphere_problem(a, y0, 1.0);
    const Vec exact = constant_solution(a, y0, 1.0);
    for (double h : {0.5, 0.1, 0.02}) {
      EXPECT_LE((integrate(p, Method::lie_euler, h).final - exact).norm(), 1e-12) << h;
      EXPECT_LE((integrate(p, Method::rkmk4, h).final - exact).norm(), 1e-12) << h;
    }
  });
}

TEST(Convergence, MeasuredOrders) {
  const ActionODE p = sphere_test_problem();
  const auto ladder = step_ladder(0.1, 5);
  ASSERT_EQ(ladder.size(), 5u);
  EXPECT_DOUBLE_EQ(ladder.back(), 0.1 / 16);
  const ConvergenceTable euler = convergence_study(p, Method::lie_euler, ladder);
  const ConvergenceTable rkmk = convergence_study(p, Method::rkmk4, ladder);
  const ConvergenceTable ambient = convergence_study(p, Method::rk4_ambient, ladder);
  EXPECT_GE(euler.slope, 0.8);
  EXPECT_LE(euler.slope, 1.2);
  EXPECT_GE(rkmk.slope, 3.7);
  EXPECT_LE(rkmk.slope, 4.3);
  EXPECT_GE(ambient.slope, 3.7);
  EXPECT_LE(ambient.slope, 4.3);
  EXPECT_FALSE(rkmk.exact);
  EXPECT_DOUBLE_EQ(rkmk.reference_h, ladder.back() / 64);
  ASSERT_EQ(rkmk.rows.size(), 5u);
  for (std::size_t i = 1; i < rkmk.rows.size(); ++i) EXPECT_LT(rkmk.rows[i].error, rkmk.rows[i - 1].error);
}

TEST(Convergence, ExactProblemIsFlagged) {
  const ActionODE p = constant_sphere_problem((Vec(3) << 0.2, 0.4, -1.0).finished());
  const ConvergenceTable t = convergence_study(p, Method::rkmk4, step_ladder());
  EXPECT_TRUE(t.exact);
}

TEST(Convergence, TruncatedDexpinvLosesOrderOnlyWhenCommutatorsMatter) {
  const auto ladder = step_ladder(0.1, 5);
  const ConvergenceTable truncated = convergence_study(sphere_test_problem(), Method::rkmk4, ladder, 0);
  EXPECT_LE(truncated.slope, 2.5);
  const ActionODE c = commuting_problem();
  const ConvergenceTable c0 = convergence_study(c, Method::rkmk4, ladder, 0);
  const ConvergenceTable c2 = convergence_study(c, Method::rkmk4, ladder, 2);
  EXPECT_GE(c0.slope, 3.7);
  EXPECT_LE(c0.slope, 4.3);
  for (std::size_t i = 0; i < c0.rows.size(); ++i) {
    EXPECT_NEAR(c0.rows[i].error, c2.rows[i].error, 1e-12 + 1e-9 * c2.rows[i].error);
  }
}

TEST(Drift, ActionIntegratorsStayOnTheSphere) {
  const ActionODE p = sphere_test_problem();
  const Trajectory rkmk = integrate(p, Method::rkmk4, 0.01, 100.0);
  EXPECT_EQ(rkmk.steps, 10000);
  EXPECT_LE(rkmk.drift, 1e-12);
  const Trajectory euler = integrate(p, Method::lie_euler, 0.01, 100.0);
  EXPECT_LE(euler.drift, 1e-12);
}

TEST(Drift, AmbientBaselineDriftsFarMore) {
  const ActionODE p = sphere_test_problem();
  const Trajectory action = integrate(p, Method::rkmk4, 0.1, 10.0);
  const Trajectory ambient = integrate(p, Method::rk4_ambient, 0.1, 10.0);
  EXPECT_LE(action.drift, 1e-12);
  EXPECT_GE(ambient.drift, 1e3 * action.drift);
  EXPECT_GE(ambient.drift, 1e-9);
}

TEST(Equivariance, RotatedProblemCommutesWithSteps) {
  const ActionODE p = sphere_test_problem();
  for_all(10, 55, [&](Gen& gen, int) {
    const Mat Q = gen.rotation3();
    const ActionODE q = rotate_problem(p, Q);
    EXPECT_LE((q.y0 - Q * p.y0).norm(), 1e-15);
    const Vec y = gen.unit(3);
    const double h = gen.uniform(0.01, 0.2);
    EXPECT_LE((lie_euler_step(q, Q * y, h) - Q * lie_euler_step(p, y, h)).norm(), 1e-12);
    EXPECT_LE((rkmk4_step(q, Q * y, h) - Q * rkmk4_step(p, y, h)).norm(), 1e-12);
  });
}

TEST(Reference, RkmkAgreesWithRetractedAmbientRk4) {
  const ActionODE p = sphere_test_problem();
  const Vec ref = ambient_reference(p, 1e-3);
  EXPECT_LE((integrate(p, Method::rkmk4, 0.01).final - ref).norm(), 1e-8);
}

TEST(Errors, BadStepsAndLadders) {
  const ActionODE p = sphere_test_problem();
  EXPECT_THROW(integrate(p, Method::rkmk4, 0.3), InputError);
  EXPECT_THROW(integrate(p, Method::rkmk4, -0.1), InputError);
  EXPECT_THROW(convergence_study(p, Method::rkmk4, {0.1, 0.05, 0.025}), InputError);
  EXPECT_THROW(convergence_study(p, Method::rkmk4, {0.1, 0.05, 0.1, 0.025}), InputError);
  EXPECT_THROW(method_from_string("midpoint"), InputError);
  EXPECT_EQ(method_from_string("rkmk4"), Method::rkmk4);
  EXPECT_EQ(to_string(Method::lie_euler), "lie_euler");
  EXPECT_THROW(rkmk4_step(p, default_start(), 0.1, 3), InputError);
}
