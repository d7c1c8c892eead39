#include "alab/builtins.hpp"

#include "alab/lie_algebra.hpp"

namespace alab {

const std::vector<CatalogEntry>& builtin_catalog() {
  static const std::vector<CatalogEntry> catalog = {
      {"algebra", "abelian<n>", "abelian Lie algebra R^n, diagonal matrix realization"},
      {"algebra", "heisenberg3", "Heisenberg algebra, [e1,e2] = e3, strictly upper-triangular realization"},
      {"algebra", "se2", "special Euclidean algebra se(2): e1 rotation, e2/e3 translations"},
      {"algebra", "so3", "rotation algebra so(3), [e_i,e_j] = e_k cyclically, Rodrigues exponential"},
      {"manifold", "euclidean<n>", "R^n, identity retraction"},
      {"manifold", "so3_group", "SO(3) in R^9 (row-major), polar-decomposition retraction"},
      {"manifold", "sphere2", "unit sphere S^2 in R^3, retraction x/|x|"},
      {"manifold", "torus2", "T^2 as a product of unit circles in R^4"},
      {"action", "abelian_torus", "R^2 rotating the two circle factors of T^2 (transitive, abelian)"},
      {"action", "se2_plane", "se(2) acting on the plane R^2 by rigid motions (transitive)"},
      {"action", "so3_group", "so(3) acting on SO(3) by right multiplication (transitive, free)"},
      {"action", "so3_sphere", "so(3) acting transitively on S^2 by rotations, xi_M(x) = x cross xi"},
      {"algebroid", "abelian_torus", "action algebroid R^2 x| T^2"},
      {"algebroid", "bla_sphere", "bundle of Lie algebras over S^2, c(x) = (1 + x1^2) c_so(3), zero anchor"},
      {"algebroid", "gauge_twisted_so3", "so(3) x| S^2 in the frame G(x) = exp(x1 K)"},
      {"algebroid", "se2_plane", "action algebroid se(2) x| R^2"},
      {"algebroid", "so3_group", "action algebroid so(3) x| SO(3)"},
      {"algebroid", "so3_sphere", "action algebroid so(3) x| S^2 of the transitive rotation action on S^2"},
      {"algebroid", "tangent_<manifold>", "tangent algebroid TM in ambient coordinates, Jacobi-Lie bracket"},
      {"algebroid", "zero_anchor_sphere", "R^2 x S^2 with zero anchor and zero bracket (non-transitive)"},
      {"connection", "canonical_flat", "derivative of fiber coordinates along the anchor"},
      {"connection", "coefficient", "DY[rho X] + Gamma(x)(X, Y) with polynomial Gamma entries"},
      {"connection", "dual", "nabla-bar_X Y = nabla_Y X + [X, Y]"},
      {"connection", "induced_from_tm", "nabla_X Y = nabla^TM_{rho X} Y for a fixture TM-connection"},
      {"connection", "so3_minus", "Cartan-Schouten (-)-connection on tangent_so3_group"},
      {"connection", "symmetrized", "(nabla + nabla-bar) / 2, torsion-free"},
      {"connection", "trivial", "nabla = 0, only on algebroids with zero anchor"},
      {"fixture", "canonical_abelian_torus", "R^2 x| T^2 with the componentwise-derivative TM-connection"},
      {"fixture", "canonical_so3", "so(3) x| S^2 with the componentwise-derivative TM-connection"},
      {"fixture", "curvature_injected_so3", "so(3) x| S^2 with Theta = x1 v2 K, not flat (rejected)"},
      {"fixture", "gauge_twisted_so3", "gauge-twisted so(3) x| S^2 with its flat frame connection"},
      {"fixture", "mis_signed_torsion", "torsion with the bracket sign flipped (negative control)"},
      {"fixture", "rbar_nonzero_so3", "so(3) x| S^2 with the twisted flat TM-connection, dual curvature != 0"},
      {"fixture", "zero_anchor_sphere", "abelian bundle over S^2 with zero anchor (rejected: non-transitive)"},
  };
  return catalog;
}

Action builtin_action(const std::string& name) {
  if (name == "so3_sphere") return so3_sphere_action();
  if (name == "se2_plane") return se2_plane_action();
  if (name == "abelian_torus") return abelian_torus_action();
  if (name == "so3_group") return so3_group_action();
  throw InputError("unknown action '" + name + "'");
}

AlgebroidPtr bla_sphere(DiffConfig config) {
  const LieAlgebra so3 = LieAlgebra::so3();
  const std::vector<double> base = so3.structure_constants();
  auto constants = [base](const Vec& x) {
    std::vector<double> c = base;
    const double s = 1.0 + x[0] * x[0];
    for (double& v : c) v *= s;
    return c;
  };
  return make_bundle_of_lie_algebras(make_sphere2(), 3, constants, config, "bla_sphere");
}

AlgebroidPtr zero_anchor_sphere(DiffConfig config) {
  auto constants = [](const Vec&) { return std::vector<double>(8, 0.0); };
  return make_bundle_of_lie_algebras(make_sphere2(), 2, constants, config, "zero_anchor_sphere");
}

namespace {

const LieAlgebra& so3_algebra() {
  static const LieAlgebra so3 = LieAlgebra::so3();
  return so3;
}

const Vec& gauge_axis() {
  static const Vec k = (Vec(3) << 0.6, -0.3, 0.9).finished();
  return k;
}

}  // namespace

Mat gauge_generator() { return so3_algebra().realize(gauge_axis()); }

Mat gauge_matrix(const Vec& x) { return exp_matrix(so3_algebra(), x[0] * gauge_axis()); }

namespace {

TMConnection twisted_tm(AlgebroidPtr bundle) {
  const Mat K = gauge_generator();
  return gauge_flat_tm_connection(
      std::move(bundle), gauge_matrix,
      [K](const Vec& x, const Vec& v) -> Mat { return v[0] * K * gauge_matrix(x); },
      "gauge_flat");
}

}  // namespace

ReconstructionFixture gauge_twisted_so3(DiffConfig config) {
  const AlgebroidPtr base = make_action_algebroid(so3_sphere_action(), config);
  const AlgebroidPtr twisted = make_gauge_transformed(base, gauge_matrix, "gauge_twisted_so3");
  return {"gauge_twisted_so3", twisted, twisted_tm(twisted), so3_sphere_action()};
}

ReconstructionFixture rbar_nonzero_so3(DiffConfig config) {
  const AlgebroidPtr alg = make_action_algebroid(so3_sphere_action(), config);
  return {"rbar_nonzero_so3", alg, twisted_tm(alg), so3_sphere_action()};
}

ReconstructionFixture curvature_injected_so3(DiffConfig config) {
  const AlgebroidPtr alg = make_action_algebroid(so3_sphere_action(), config);
  const Mat K = gauge_generator();
  TMConnection conn{"curvature_injected", alg,
                    [K](const Vec& x, const Vec& v) -> Mat { return x[0] * v[1] * K; }};
  return {"curvature_injected_so3", alg, conn, so3_sphere_action()};
}

ReconstructionFixture canonical_so3(DiffConfig config) {
  const AlgebroidPtr alg = make_action_algebroid(so3_sphere_action(), config);
  return {"canonical_so3", alg, flat_tm_connection(alg), so3_sphere_action()};
}

ReconstructionFixture canonical_abelian_torus(DiffConfig config) {
  const AlgebroidPtr alg = make_action_algebroid(abelian_torus_action(), config);
  return {"canonical_abelian_torus", alg, flat_tm_connection(alg), abelian_torus_action()};
}

ReconstructionFixture zero_anchor_fixture(DiffConfig config) {
  const AlgebroidPtr alg = zero_anchor_sphere(config);
  return {"zero_anchor_sphere", alg, flat_tm_connection(alg), std::nullopt};
}

ReconstructionFixture reconstruction_fixture(const std::string& name, DiffConfig config) {
  if (name == "gauge_twisted_so3") return gauge_twisted_so3(config);
  if (name == "rbar_nonzero_so3") return rbar_nonzero_so3(config);
  if (name == "curvature_injected_so3") return curvature_injected_so3(config);
  if (name == "canonical_so3") return canonical_so3(config);
  if (name == "canonical_abelian_torus") return canonical_abelian_torus(config);
  if (name == "zero_anchor_sphere") return zero_anchor_fixture(config);
  throw InputError("unknown reconstruction fixture '" + name + "'");
}

AlgebroidPtr builtin_algebroid(const std::string& name, DiffConfig config) {
  if (name == "so3_sphere" || name == "se2_plane" || name == "abelian_torus" ||
      name == "so3_group") {
    return make_action_algebroid(builtin_action(name), config);
  }
  if (name == "bla_sphere") return bla_sphere(config);
  if (name == "zero_anchor_sphere") return zero_anchor_sphere(config);
  if (name == "gauge_twisted_so3") return gauge_twisted_so3(config).algebroid;
  const std::string prefix = "tangent_";
  if (name.rfind(prefix, 0) == 0) {
    return make_tangent_algebroid(make_manifold(name.substr(prefix.size())), config);
  }
  throw InputError("unknown algebroid '" + name + "'");
}

Section MisSignedTorsion::torsion(const Section& X, const Section& Y) const {
  return product(X, Y) - product(Y, X) + bracket(X, Y);
}

}  // namespace alab
