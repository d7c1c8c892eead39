#pragma once

#include "alab/algebroid.hpp"
#include "alab/connection.hpp"

#include <string>
#include <vector>

namespace alab {

struct CatalogEntry {
  std::string category;  // algebra, manifold, action, algebroid, connection, fixture
  std::string name;
  std::string description;
};

/// Stable, sorted within each category.
const std::vector<CatalogEntry>& builtin_catalog();

/// so(3) (x) S^2, se(2) (x) R^2, R^2 (x) T^2, so(3) (x) SO(3), tangent_<manifold>,
/// bla_sphere, zero_anchor_sphere, gauge_twisted_so3.
AlgebroidPtr builtin_algebroid(const std::string& name, DiffConfig config = {});
Action builtin_action(const std::string& name);

/// c(x) = (1 + x1^2) c_so(3) over S^2.
AlgebroidPtr bla_sphere(DiffConfig config = {});

/// Bundle of abelian Lie algebras R^2 x S^2 with zero anchor and zero bracket.
AlgebroidPtr zero_anchor_sphere(DiffConfig config = {});

/// Fixed element of so(3) used for the gauge twist G(x) = exp(x1 K).
Mat gauge_generator();
Mat gauge_matrix(const Vec& x);

/// A flat or non-flat TM-connection paired with the algebroid it acts on.
struct ReconstructionFixture {
  std::string name;
  AlgebroidPtr algebroid;
  TMConnection connection;
  /// The action the recovered anchor should match (absent when none applies).
  std::optional<Action> reference;
};

/// so(3) (x) S^2 gauge transformed by G, with the flat TM-connection whose
/// parallel sections are the columns of G.
ReconstructionFixture gauge_twisted_so3(DiffConfig config = {});
/// Untwisted so(3) (x) S^2 with the same twisted TM-connection: flat, but its
/// dual is not, so the structure functions vary.
ReconstructionFixture rbar_nonzero_so3(DiffConfig config = {});
/// so(3) (x) S^2 with Theta(x, v) = x1 v2 K: not flat.
ReconstructionFixture curvature_injected_so3(DiffConfig config = {});
/// so(3) (x) S^2 with the componentwise-derivative TM-connection.
ReconstructionFixture canonical_so3(DiffConfig config = {});
/// R^2 (x) T^2 with the componentwise-derivative TM-connection.
ReconstructionFixture canonical_abelian_torus(DiffConfig config = {});
/// Zero-anchor abelian bundle over S^2 with the componentwise derivative.
ReconstructionFixture zero_anchor_fixture(DiffConfig config = {});

ReconstructionFixture reconstruction_fixture(const std::string& name, DiffConfig config = {});

/// Negative control: torsion with the bracket term's sign flipped,
/// nabla_X Y - nabla_Y X + [X, Y].
class MisSignedTorsion : public TensorCalculus {
 public:
  using TensorCalculus::TensorCalculus;
  Section torsion(const Section& X, const Section& Y) const override;
};

}  // namespace alab
