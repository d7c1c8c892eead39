#pragma once

#include "alab/algebroid.hpp"
#include "alab/section.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace alab {

/// TM-connection on a trivialized bundle A -> M:
/// nabla_v Y (x) = DY(x)[v] + Theta(x, v) Y(x), Theta linear in v (k x k).
struct TMConnection {
  std::string name;
  AlgebroidPtr bundle;
  std::function<Mat(const Vec& x, const Vec& v)> coefficient;

  Vec covariant(const Section& Y, const Vec& x, const Vec& v) const;
  /// nabla_V Y for a tangent field V, lazily.
  Section covariant(const Section& V, const Section& Y) const;
};

/// Componentwise derivative in the trivialization (Theta = 0).
TMConnection flat_tm_connection(AlgebroidPtr bundle);

/// The flat TM-connection whose parallel sections are the columns of G(x):
/// Theta(x, v) = -dG(x)[v] G(x)^{-1}.
TMConnection gauge_flat_tm_connection(AlgebroidPtr bundle, GaugeField gauge,
                                      std::function<Mat(const Vec& x, const Vec& v)> gauge_derivative,
                                      std::string name);

enum class ConnectionKind {
  canonical_flat,
  zero_on_trivial_anchor,
  coefficient,
  induced_from_tm,
  dual,
  symmetrized,
  custom
};

std::string to_string(ConnectionKind kind);

/// An A-connection on A, i.e. the product X |> Y = nabla_X Y on sections.
class AConnection {
 public:
  using Product = std::function<Section(const Section& X, const Section& Y)>;

  AConnection(AlgebroidPtr algebroid, ConnectionKind kind, std::string name, Product product,
              bool vanishes_on_anchor_kernel = false);

  Section operator()(const Section& X, const Section& Y) const { return product_(X, Y); }
  Vec at(const Section& X, const Section& Y, const Vec& x) const { return product_(X, Y)(x); }

  const Algebroid& algebroid() const { return *algebroid_; }
  const AlgebroidPtr& algebroid_ptr() const { return algebroid_; }
  ConnectionKind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  /// nabla_X Y = 0 whenever rho(X) = 0 (true for connections induced from TM).
  bool vanishes_on_anchor_kernel() const { return vanishes_on_anchor_kernel_; }

 private:
  AlgebroidPtr algebroid_;
  ConnectionKind kind_;
  std::string name_;
  Product product_;
  bool vanishes_on_anchor_kernel_;
};

/// nabla_X Y = nabla^{TM}_{rho(X)} Y.
AConnection induce_from_tm(const TMConnection& tm, AlgebroidPtr algebroid);

/// Induced from the componentwise-derivative TM-connection. Vanishes on
/// constant sections.
AConnection canonical_flat(AlgebroidPtr algebroid);

/// nabla = 0. Throws InputError unless the anchor is identically zero.
AConnection trivial_connection(AlgebroidPtr algebroid);

/// nabla_X Y = DY[rho(X)] + Gamma(x)(X, Y), admissible-projected. `gamma` has
/// k^3 entries with Gamma(a, b)_l = sum_ij gamma[(i*k + j)*k + l] a_i b_j.
AConnection coefficient_connection(AlgebroidPtr algebroid, std::vector<Polynomial> gamma,
                                   std::string name = "coefficient");

/// Coefficient connection with seeded random polynomial Gamma entries.
AConnection random_coefficient_connection(AlgebroidPtr algebroid, std::uint64_t seed,
                                          int degree = 1, double scale = 0.5);

/// nabla-bar_X Y = nabla_Y X + [X, Y]. Throws UnsupportedError without a bracket.
AConnection dual(const AConnection& conn);

/// (nabla + nabla-bar) / 2.
AConnection symmetrize(const AConnection& conn);

/// The Cartan-Schouten (-)-connection on the tangent algebroid of SO(3):
/// nabla_X Y (R) = R D(R^T Y)(R)[X], left-invariant fields are parallel.
AConnection so3_minus_connection(AlgebroidPtr tangent_so3);

/// Curvature, torsion and their covariant derivatives, as lazily evaluated
/// sections. Virtual so that test fixtures can substitute a broken tensor.
class TensorCalculus {
 public:
  explicit TensorCalculus(AConnection conn);
  virtual ~TensorCalculus() = default;

  const AConnection& connection() const { return conn_; }
  const Algebroid& algebroid() const { return conn_.algebroid(); }

  Section product(const Section& X, const Section& Y) const { return conn_(X, Y); }
  Section bracket(const Section& X, const Section& Y) const;

  /// nabla_X Y - nabla_Y X - [X, Y]
  virtual Section torsion(const Section& X, const Section& Y) const;
  /// (nabla_X nabla_Y - nabla_Y nabla_X - nabla_[X,Y]) Z
  virtual Section curvature(const Section& X, const Section& Y, const Section& Z) const;
  /// nabla_Z(T(X,Y)) - T(nabla_Z X, Y) - T(X, nabla_Z Y)
  Section nabla_T(const Section& Z, const Section& X, const Section& Y) const;
  /// nabla_Z(R(X,Y)W) - R(nabla_Z X, Y)W - R(X, nabla_Z Y)W - R(X,Y) nabla_Z W
  Section nabla_R(const Section& Z, const Section& X, const Section& Y, const Section& W) const;
  /// X |> (Y |> Z) - (X |> Y) |> Z
  Section associator(const Section& X, const Section& Y, const Section& Z) const;
  /// a(X, Y, Z) - a(Y, X, Z)
  Section triple_bracket(const Section& X, const Section& Y, const Section& Z) const;

 private:
  AConnection conn_;
};

// Point evaluations.
Vec curvature(const AConnection& conn, const Section& X, const Section& Y, const Section& Z,
              const Vec& x);
Vec torsion(const AConnection& conn, const Section& X, const Section& Y, const Vec& x);
Vec nabla_T(const AConnection& conn, const Section& Z, const Section& X, const Section& Y,
            const Vec& x);
Vec nabla_R(const AConnection& conn, const Section& Z, const Section& X, const Section& Y,
            const Section& W, const Vec& x);
Vec associator(const AConnection& conn, const Section& X, const Section& Y, const Section& Z,
               const Vec& x);
Vec triple_bracket(const AConnection& conn, const Section& X, const Section& Y,
                   const Section& Z, const Vec& x);

}  // namespace alab
