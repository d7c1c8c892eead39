#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace alab {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Malformed arguments: wrong dimensions, non-tangent directions, bad names.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The requested operation is not defined for this object.
class UnsupportedError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// A constructor's structural probe failed (homomorphism, Jacobi, ...).
class ConstructionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A numerical procedure could not produce a trustworthy result.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Finite-difference steps. `h1` differentiates leaf expressions, `h2` is used
/// once the expression being differentiated already contains a difference
/// quotient.
struct DiffConfig {
  double h1 = 1e-4;
  double h2 = 1e-3;
  /// 2: (F(h) - F(-h)) / 2h.  4: the five-point central stencil.
  int stencil = 4;
};

inline std::string format_vec(const Vec& v) {
  std::string out = "(";
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += std::to_string(v[i]);
  }
  return out + ")";
}

}  // namespace alab
