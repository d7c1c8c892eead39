#pragma once

#include "alab/types.hpp"

#include <string>
#include <vector>

namespace alab {

/// Finite-dimensional real Lie algebra given by structure constants in a
/// fixed basis e_1..e_n, with [e_i, e_j] = sum_k c(i,j,k) e_k.
///
/// Elements are plain coefficient vectors of length dim(). An optional matrix
/// realization (one matrix per basis element) enables exp_matrix().
class LieAlgebra {
 public:
  /// Throws InputError if the constant array has the wrong size or is not
  /// antisymmetric in (i, j). The Jacobi identity is not enforced here; use
  /// verify_jacobi() or make_lie_algebra().
  LieAlgebra(std::string name, int dim, std::vector<double> constants,
             std::vector<Mat> basis_matrices = {});

  static LieAlgebra so3();
  static LieAlgebra se2();
  static LieAlgebra heisenberg3();
  static LieAlgebra abelian(int n);
  /// Looks up so3, se2, heisenberg3, abelianN. Throws InputError otherwise.
  static LieAlgebra builtin(const std::string& name);

  const std::string& name() const { return name_; }
  int dim() const { return dim_; }
  double c(int i, int j, int k) const { return constants_[(i * dim_ + j) * dim_ + k]; }
  const std::vector<double>& structure_constants() const { return constants_; }

  bool has_realization() const { return !basis_.empty(); }
  const std::vector<Mat>& basis_matrices() const { return basis_; }
  /// sum_i xi_i E_i. Throws UnsupportedError without a realization.
  Mat realize(const Vec& xi) const;

  Vec bracket(const Vec& a, const Vec& b) const;
  /// Matrix of ad_a in the basis: (ad_a)_{k j} = sum_i a_i c(i,j,k).
  Mat ad(const Vec& a) const;
  Vec basis_vector(int i) const { return Vec::Unit(dim_, i); }

  void check_element(const Vec& a) const;

 private:
  std::string name_;
  int dim_;
  std::vector<double> constants_;
  std::vector<Mat> basis_;
};

/// Same as the constructor but also rejects structure constants whose Jacobi
/// residual exceeds `jacobi_tol`.
LieAlgebra make_lie_algebra(std::string name, int dim, std::vector<double> constants,
                            std::vector<Mat> basis_matrices = {}, double jacobi_tol = 1e-10);

/// Maximum over basis quadruples of the cyclic Jacobi sum
/// sum_m (c_ij^m c_mk^l + c_jk^m c_mi^l + c_ki^m c_mj^l).
double verify_jacobi(const LieAlgebra& alg);

/// exp of the realized matrix. Closed form (Rodrigues) for so(3).
Mat exp_matrix(const LieAlgebra& alg, const Vec& xi);

/// Truncated inverse differential of exp:
/// v - 1/2 [u, v] + 1/12 [u, [u, v]], keeping `order` commutators (0, 1 or 2).
Vec dexpinv(const LieAlgebra& alg, const Vec& u, const Vec& v, int order = 2);

/// K(x, y) = tr(ad_x ad_y) in the basis.
Mat killing_form(const LieAlgebra& alg);

/// Isomorphism invariants used for dim <= 3 identification.
struct AlgebraInvariants {
  int killing_positive = 0;
  int killing_negative = 0;
  int killing_zero = 0;
  int derived_dim = 0;

  bool operator==(const AlgebraInvariants&) const = default;
};

AlgebraInvariants algebra_invariants(const LieAlgebra& alg, double tol = 1e-8);

}  // namespace alab
