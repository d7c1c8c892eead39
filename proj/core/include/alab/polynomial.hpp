#pragma once

#include "alab/types.hpp"

#include <functional>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace alab {

/// Real polynomial in the ambient coordinates x1..xN.
class Polynomial {
 public:
  using Exponents = std::vector<int>;

  explicit Polynomial(int num_vars = 0) : num_vars_(num_vars) {}

  static Polynomial constant(int num_vars, double value);
  static Polynomial variable(int num_vars, int index);
  /// Every monomial of total degree <= max_degree with a coefficient drawn
  /// uniformly from [-scale, scale].
  static Polynomial random(int num_vars, int max_degree, std::mt19937_64& rng,
                           double scale = 1.0);
  /// Parses monomial keys such as "x1^2 x3", "x2", "1" or "" (constant).
  static Polynomial from_monomials(int num_vars,
                                   const std::map<std::string, double>& monomials);

  int num_vars() const { return num_vars_; }
  int degree() const;
  bool is_zero() const { return terms_.empty(); }

  double operator()(const Vec& x) const;
  Vec gradient(const Vec& x) const;
  Polynomial derivative(int var) const;

  void add_term(const Exponents& exps, double coefficient);
  const std::map<Exponents, double>& terms() const { return terms_; }

  Polynomial operator+(const Polynomial& other) const;
  Polynomial operator-(const Polynomial& other) const;
  Polynomial operator*(const Polynomial& other) const;
  Polynomial operator*(double s) const;

  /// Inverse of from_monomials: "x1^2 x3" -> coefficient.
  std::map<std::string, double> to_monomials() const;

 private:
  int num_vars_;
  std::map<Exponents, double> terms_;
};

/// A real function on the base manifold; either a stored polynomial or a
/// named closed form.
class SmoothScalar {
 public:
  using Fn = std::function<double(const Vec&)>;

  SmoothScalar() = default;
  /*implicit*/ SmoothScalar(Polynomial p);
  SmoothScalar(std::string name, Fn fn);

  static SmoothScalar constant(int num_vars, double value) {
    return SmoothScalar(Polynomial::constant(num_vars, value));
  }

  double operator()(const Vec& x) const { return fn_(x); }
  const Polynomial* polynomial() const { return poly_ ? &*poly_ : nullptr; }
  const std::string& name() const { return name_; }

 private:
  std::string name_;
  Fn fn_;
  std::optional<Polynomial> poly_;
};

}  // namespace alab
