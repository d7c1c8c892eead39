#pragma once

#include "alab/types.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <cstdint>
#include <random>
#include <string>

namespace alab::testing {

/// Small seeded generator for property tests.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo = -1.0, double hi = 1.0) {
    return std::uniform_real_distribution<double>(lo, hi)(rng_);
  }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

  Vec vec(int n, double lo = -1.0, double hi = 1.0) {
    Vec v(n);
    for (int i = 0; i < n; ++i) v[i] = uniform(lo, hi);
    return v;
  }

  Vec unit(int n) {
    Vec v = vec(n);
    while (v.norm() < 1e-3) v = vec(n);
    return v.normalized();
  }

  /// Random rotation from a QR factorization with the sign fixed.
  Mat rotation3() {
    Mat a(3, 3);
    for (int i = 0; i < 9; ++i) a(i / 3, i % 3) = uniform();
    Eigen::HouseholderQR<Mat> qr(a);
    Mat q = qr.householderQ();
    if (q.determinant() < 0) q.col(0) *= -1.0;
    return q;
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

/// Runs `body(gen, case)` for `cases` cases, each with its own seed.
template <class F>
void for_all(int cases, std::uint64_t seed, F&& body) {
  for (int c = 0; c < cases; ++c) {
    const std::uint64_t s = seed + 7919ULL * static_cast<std::uint64_t>(c);
    SCOPED_TRACE("case " + std::to_string(c) + " seed " + std::to_string(s));
    Gen gen(s);
    body(gen, c);
  }
}

/// Independent hat map so(3) -> 3x3 antisymmetric, [a]_x b = a cross b.
inline Mat hat3(const Vec& a) {
  Mat m(3, 3);
  m << 0, -a[2], a[1], a[2], 0, -a[0], -a[1], a[0], 0;
  return m;
}

inline Vec cross3(const Vec& a, const Vec& b) { return hat3(a) * b; }

/// Truncated power series of the matrix exponential.
inline Mat exp_series(const Mat& a, int terms = 30) {
  Mat out = Mat::Identity(a.rows(), a.cols());
  Mat term = out;
  for (int n = 1; n < terms; ++n) {
    term = term * a / static_cast<double>(n);
    out += term;
  }
  return out;
}

}  // namespace alab::testing
