#pragma once

#include "alab/polynomial.hpp"
#include "alab/types.hpp"

#include <functional>
#include <memory>
#include <vector>

namespace alab {

/// A map from points of the base manifold (ambient coordinates) to fiber
/// coefficient vectors: an element of the space of sections in a global
/// trivialization.
///
/// Sections are cheap to copy and immutable. Expressions built from other
/// sections (brackets, covariant derivatives, ...) are stored as closures and
/// evaluated lazily; `fd_depth()` counts how many nested difference quotients
/// an evaluation performs, which selects the step when the result is itself
/// differentiated. Polynomial sections are differentiated exactly.
class Section {
 public:
  using Fn = std::function<Vec(const Vec&)>;

  Section() = default;
  Section(int dim, Fn fn, int fd_depth = 0);

  static Section from_polynomials(std::vector<Polynomial> components);
  static Section constant(const Vec& value, int num_vars);
  static Section zero(int dim, int num_vars) { return constant(Vec::Zero(dim), num_vars); }

  Vec operator()(const Vec& x) const { return data_->fn(x); }

  bool valid() const { return static_cast<bool>(data_); }
  int dim() const { return data_->dim; }
  int fd_depth() const { return data_->fd_depth; }
  const std::vector<Polynomial>* polynomials() const {
    return data_->polys.empty() ? nullptr : &data_->polys;
  }
  /// Exact ambient Jacobian (dim x num_vars). Requires a polynomial section.
  Mat jacobian(const Vec& x) const;

  Section operator+(const Section& other) const;
  Section operator-(const Section& other) const;
  Section operator*(double s) const;
  Section times(const SmoothScalar& f) const;

 private:
  struct Compiled;
  struct Data {
    int dim = 0;
    int fd_depth = 0;
    Fn fn;
    std::vector<Polynomial> polys;
    std::shared_ptr<const Compiled> compiled;
  };
  std::shared_ptr<const Data> data_;
};

/// fd_depth of a section computed from `parts` without new differentiation.
int combined_depth(std::initializer_list<const Section*> parts);

/// Sup norm of a section over a point set.
double sup_norm(const Section& s, const std::vector<Vec>& points);

}  // namespace alab
