#include "alab/lie_algebra.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace alab;
using alab::testing::Gen;
using alab::testing::for_all;

namespace {

std::vector<LieAlgebra> builtins() {
  return {LieAlgebra::so3(), LieAlgebra::se2(), LieAlgebra::heisenberg3(), LieAlgebra::abelian(2),
          LieAlgebra::abelian(4)};
}

// Coordinates of a matrix in the span of the basis matrices, by least squares.
Vec coordinates(const std::vector<Mat>& basis, const Mat& m) {
  const Eigen::Index n = m.size();
  Mat a(n, static_cast<Eigen::Index>(basis.size()));
  for (std::size_t i = 0; i < basis.size(); ++i) {
    a.col(static_cast<Eigen::Index>(i)) = basis[i].reshaped();
  }
  return a.colPivHouseholderQr().solve(m.reshaped());
}

double cyclic_sum_oracle(int n, const std::vector<double>& c) {
  auto C = [&](int i, int j, int k) { return c[static_cast<std::size_t>((i * n + j) * n + k)]; };
  double worst = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          double s = 0.0;
          for (int m = 0; m < n; ++m) {
            s += C(i, j, m) * C(m, k, l) + C(j, k, m) * C(m, i, l) + C(k, i, m) * C(m, j, l);
          }
          worst = std::max(worst, std::abs(s));
        }
  return worst;
}

}  // namespace

TEST(LieAlgebra, So3BasisBracket) {
  const LieAlgebra g = LieAlgebra::so3();
  const Vec r = g.bracket(Vec::Unit(3, 0), Vec::Unit(3, 1));
  EXPECT_LT((r - Vec::Unit(3, 2)).norm(), 1e-15);
}

TEST(LieAlgebra, AbelianBracketVanishes) {
  const LieAlgebra g = LieAlgebra::abelian(2);
  Gen gen(1);
  for (int t = 0; t < 10; ++t) EXPECT_EQ(g.bracket(gen.vec(2), gen.vec(2)).norm(), 0.0);
}

TEST(LieAlgebra, Se2TableMatchesHandExpandedCommutators) {
  // Defining representation: rotation generator and the two translations.
  Mat E1 = Mat::Zero(3, 3), E2 = Mat::Zero(3, 3), E3 = Mat::Zero(3, 3);
  E1(0, 1) = -1.0;
  E1(1, 0) = 1.0;
  E2(0, 2) = 1.0;
  E3(1, 2) = 1.0;
  const std::vector<Mat> E = {E1, E2, E3};
  const LieAlgebra g = LieAlgebra::se2();
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      const Mat comm = E[i] * E[j] - E[j] * E[i];
      const Vec expected = coordinates(E, comm);
      EXPECT_LT((g.bracket(Vec::Unit(3, i), Vec::Unit(3, j)) - expected).norm(), 1e-14)
          << "pair " << i << "," << j;
    }
  }
}

TEST(LieAlgebra, JacobiHoldsForBuiltins) {
  for (const LieAlgebra& g : builtins()) {
    EXPECT_LE(verify_jacobi(g), 1e-12) << g.name();
    EXPECT_LE(cyclic_sum_oracle(g.dim(), g.structure_constants()), 1e-12) << g.name();
  }
}

TEST(LieAlgebra, RejectsBrokenAntisymmetry) {
  std::vector<double> c = LieAlgebra::so3().structure_constants();
  c[(0 * 3 + 1) * 3 + 2] = -1.0;  // now c_12^3 = c_21^3 = -1
  EXPECT_THROW(LieAlgebra("broken", 3, c), InputError);
}

TEST(LieAlgebra, RandomAntisymmetricConstantsViolateJacobi) {
  for_all(5, 300, [](Gen& gen, int) {
    const int n = 3;
    std::vector<double> c(27, 0.0);
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        for (int k = 0; k < n; ++k) {
          const double v = gen.uniform(-2.0, 2.0);
          c[(i * n + j) * n + k] = v;
          c[(j * n + i) * n + k] = -v;
        }
    const LieAlgebra g("random", n, c);
    const double oracle = cyclic_sum_oracle(n, c);
    EXPECT_NEAR(verify_jacobi(g), oracle, 1e-12);
    EXPECT_GT(verify_jacobi(g), 0.1);
    EXPECT_THROW(make_lie_algebra("random", n, c), InputError);
  });
}

TEST(LieAlgebra, DimensionMismatchIsInputError) {
  const LieAlgebra g = LieAlgebra::so3();
  EXPECT_THROW(g.bracket(Vec::Zero(2), Vec::Zero(3)), InputError);
  EXPECT_THROW(LieAlgebra("short", 3, std::vector<double>(26, 0.0)), InputError);
  EXPECT_THROW(LieAlgebra::builtin("so4"), InputError);
}

TEST(LieAlgebra, BracketAntisymmetricOnRandomPairs) {
  for (const LieAlgebra& g : builtins()) {
    Gen gen(17);
    for (int t = 0; t < 100; ++t) {
      const Vec a = gen.vec(g.dim()), b = gen.vec(g.dim());
      EXPECT_LE((g.bracket(a, b) + g.bracket(b, a)).norm(), 1e-14) << g.name();
    }
  }
}

TEST(LieAlgebra, BracketMatchesMatrixCommutator) {
  for (const LieAlgebra& g : builtins()) {
    ASSERT_TRUE(g.has_realization());
    Gen gen(23);
    for (int t = 0; t < 100; ++t) {
      const Vec a = gen.vec(g.dim()), b = gen.vec(g.dim());
      const Mat A = g.realize(a), B = g.realize(b);
      const Vec expected = coordinates(g.basis_matrices(), A * B - B * A);
      EXPECT_LE((g.bracket(a, b) - expected).norm(), 1e-12) << g.name();
    }
  }
}

TEST(ExpMatrix, ZeroIsIdentity) {
  for (const LieAlgebra& g : builtins()) {
    const Mat e = exp_matrix(g, Vec::Zero(g.dim()));
    EXPECT_LE((e - Mat::Identity(e.rows(), e.cols())).norm(), 1e-15) << g.name();
  }
}

TEST(ExpMatrix, QuarterTurnMatchesSeries) {
  const LieAlgebra g = LieAlgebra::so3();
  const Vec xi = (Vec(3) << 0.0, 0.0, std::numbers::pi / 2).finished();
  const Mat R = exp_matrix(g, xi);
  EXPECT_LE((R - alab::testing::exp_series(g.realize(xi))).norm(), 1e-12);
  Mat quarter(3, 3);
  quarter << 0, -1, 0, 1, 0, 0, 0, 0, 1;
  EXPECT_LE((R - quarter).norm(), 1e-12);
}

TEST(ExpMatrix, RodriguesAgreesWithSeriesOnRandomElements) {
  const LieAlgebra g = LieAlgebra::so3();
  for_all(20, 41, [&](Gen& gen, int) {
    const Vec xi = gen.vec(3, -2.0, 2.0);
    EXPECT_LE((exp_matrix(g, xi) - alab::testing::exp_series(g.realize(xi), 40)).norm(), 1e-12);
  });
}

TEST(ExpMatrix, Se2TranslationIsNilpotent) {
  const LieAlgebra g = LieAlgebra::se2();
  const Vec xi = (Vec(3) << 0.0, 0.7, -1.3).finished();
  const Mat e = exp_matrix(g, xi);
  EXPECT_LE((e.topLeftCorner(2, 2) - Mat::Identity(2, 2)).norm(), 1e-15);
  EXPECT_NEAR(e(0, 2), 0.7, 1e-15);
  EXPECT_NEAR(e(1, 2), -1.3, 1e-15);
  EXPECT_LE((e - alab::testing::exp_series(g.realize(xi))).norm(), 1e-14);
}

TEST(ExpMatrix, MissingRealizationIsUnsupported) {
  const LieAlgebra g("plain", 2, std::vector<double>(8, 0.0));
  EXPECT_THROW(exp_matrix(g, Vec::Zero(2)), UnsupportedError);
}

TEST(Dexpinv, CollapsesAtZeroAndTruncates) {
  const LieAlgebra g = LieAlgebra::so3();
  Gen gen(5);
  const Vec u = gen.vec(3), v = gen.vec(3);
  EXPECT_LE((dexpinv(g, Vec::Zero(3), v) - v).norm(), 1e-15);
  EXPECT_LE((dexpinv(g, u, v, 0) - v).norm(), 1e-15);
  EXPECT_LE((dexpinv(g, u, v, 1) - (v - 0.5 * alab::testing::cross3(u, v))).norm(), 1e-15);
  const Vec uv = alab::testing::cross3(u, v);
  EXPECT_LE((dexpinv(g, u, v, 2) - (v - 0.5 * uv + alab::testing::cross3(u, uv) / 12.0)).norm(), 1e-15);
  EXPECT_THROW(dexpinv(g, u, v, 3), InputError);
  EXPECT_THROW(dexpinv(g, u, v, -1), InputError);
}

// d/dt exp(u + t w) exp(-u) at t = 0 is dexp_u(w) in the realization;
// dexpinv must undo it up to the truncation order.
TEST(Dexpinv, InvertsFiniteDifferenceOfExp) {
  for (const LieAlgebra& g : {LieAlgebra::so3(), LieAlgebra::se2()}) {
    for_all(5, 77, [&](Gen& gen, int) {
      const Vec dir = gen.unit(g.dim());
      const Vec w = gen.vec(g.dim());
      for (double s : {0.02, 0.01}) {
        const Vec u = s * dir;
        const double eps = 1e-5;
        const Mat d = (exp_matrix(g, u + eps * w) - exp_matrix(g, u - eps * w)) / (2 * eps);
        const Vec dexp_w = coordinates(g.basis_matrices(), d * exp_matrix(g, -u));
        for (int order = 0; order <= 2; ++order) {
          const double err = (dexpinv(g, u, dexp_w, order) - w).norm();
          EXPECT_LE(err, 2.0 * std::pow(s, order + 1) * w.norm() + 1e-9)
              << g.name() << " order " << order << " s " << s;
        }
        const double err0 = (dexpinv(g, u, dexp_w, 0) - w).norm();
        const double err2 = (dexpinv(g, u, dexp_w, 2) - w).norm();
        if (err0 > 1e-9) EXPECT_LT(err2, err0);
      }
    });
  }
}

TEST(Invariants, KillingSignatureAndDerivedDimension) {
  EXPECT_EQ(algebra_invariants(LieAlgebra::so3()), (AlgebraInvariants{0, 3, 0, 3}));
  EXPECT_EQ(algebra_invariants(LieAlgebra::se2()), (AlgebraInvariants{0, 1, 2, 2}));
  EXPECT_EQ(algebra_invariants(LieAlgebra::heisenberg3()), (AlgebraInvariants{0, 0, 3, 1}));
  EXPECT_EQ(algebra_invariants(LieAlgebra::abelian(2)), (AlgebraInvariants{0, 0, 2, 0}));
}

TEST(Invariants, KillingFormOfSo3IsMinusTwiceIdentity) {
  EXPECT_LE((killing_form(LieAlgebra::so3()) + 2.0 * Mat::Identity(3, 3)).norm(), 1e-14);
}
