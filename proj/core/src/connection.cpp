#include "alab/connection.hpp"

#include <random>

namespace alab {

namespace {

Eigen::Matrix3d as_matrix3(const Vec& x) {
  return Eigen::Map<const Eigen::Matrix<double, 3, 3, Eigen::RowMajor>>(x.data());
}

Vec as_vector9(const Eigen::Matrix3d& m) {
  Vec out(9);
  Eigen::Map<Eigen::Matrix<double, 3, 3, Eigen::RowMajor>>(out.data()) = m;
  return out;
}

}  // namespace

Vec TMConnection::covariant(const Section& Y, const Vec& x, const Vec& v) const {
  Vec out = bundle->diff().along_unchecked(Y, x, v);
  if (v.squaredNorm() != 0.0) out += coefficient(x, v) * Y(x);
  return bundle->admissible(out, x);
}

Section TMConnection::covariant(const Section& V, const Section& Y) const {
  const int depth = std::max(V.fd_depth(), Differentiator::derivative_depth(Y));
  return Section(Y.dim(),
                 [self = *this, V, Y](const Vec& x) -> Vec { return self.covariant(Y, x, V(x)); },
                 depth);
}

TMConnection flat_tm_connection(AlgebroidPtr bundle) {
  const int k = bundle->fiber_dim();
  return TMConnection{"flat", std::move(bundle),
                      [k](const Vec&, const Vec&) -> Mat { return Mat::Zero(k, k); }};
}

TMConnection gauge_flat_tm_connection(AlgebroidPtr bundle, GaugeField gauge,
                                      std::function<Mat(const Vec& x, const Vec& v)> gauge_derivative,
                                      std::string name) {
  return TMConnection{std::move(name), std::move(bundle),
                      [gauge, gauge_derivative](const Vec& x, const Vec& v) -> Mat {
                        const Mat g = gauge(x);
                        // -dG G^{-1} = -(G^{-T} dG^T)^T
                        return -g.transpose().lu().solve(gauge_derivative(x, v).transpose()).transpose();
                      }};
}

std::string to_string(ConnectionKind kind) {
  switch (kind) {
    case ConnectionKind::canonical_flat: return "canonical_flat";
    case ConnectionKind::zero_on_trivial_anchor: return "zero_on_trivial_anchor";
    case ConnectionKind::coefficient: return "coefficient";
    case ConnectionKind::induced_from_tm: return "induced_from_tm";
    case ConnectionKind::dual: return "dual";
    case ConnectionKind::symmetrized: return "symmetrized";
    case ConnectionKind::custom: return "custom";
  }
  return "custom";
}

AConnection::AConnection(AlgebroidPtr algebroid, ConnectionKind kind, std::string name,
                         Product product, bool vanishes_on_anchor_kernel)
    : algebroid_(std::move(algebroid)), kind_(kind), name_(std::move(name)),
      product_(std::move(product)), vanishes_on_anchor_kernel_(vanishes_on_anchor_kernel) {
  if (!algebroid_) throw InputError("connection needs an algebroid");
}

AConnection induce_from_tm(const TMConnection& tm, AlgebroidPtr algebroid) {
  if (tm.bundle->fiber_dim() != algebroid->fiber_dim()) {
    throw InputError("TM-connection fiber dimension does not match the algebroid");
  }
  auto product = [tm, alg = algebroid](const Section& X, const Section& Y) {
    const int depth = std::max(X.fd_depth(), Differentiator::derivative_depth(Y));
    return Section(
        Y.dim(),
        [tm, alg, X, Y](const Vec& x) -> Vec { return tm.covariant(Y, x, alg->anchor(X(x), x)); },
        depth);
  };
  return AConnection(algebroid, ConnectionKind::induced_from_tm, "induced_" + tm.name,
                     std::move(product), true);
}

AConnection canonical_flat(AlgebroidPtr algebroid) {
  if (algebroid->spec().fiber_projector) {
    throw UnsupportedError("canonical flat connection needs an unconstrained trivialization");
  }
  auto product = [alg = algebroid](const Section& X, const Section& Y) {
    const int depth = std::max(X.fd_depth(), Differentiator::derivative_depth(Y));
    return Section(
        Y.dim(),
        [alg, X, Y](const Vec& x) -> Vec {
          return alg->diff().along_unchecked(Y, x, alg->anchor(X(x), x));
        },
        depth);
  };
  return AConnection(algebroid, ConnectionKind::canonical_flat, "canonical_flat",
                     std::move(product), true);
}

AConnection trivial_connection(AlgebroidPtr algebroid) {
  if (!algebroid->anchor_is_zero()) {
    throw InputError("the zero connection is only an A-connection when the anchor vanishes ('" +
                     algebroid->name() + "' has a nonzero anchor)");
  }
  auto product = [k = algebroid->fiber_dim(), n = algebroid->num_vars()](const Section&,
                                                                           const Section&) {
    return Section::zero(k, n);
  };
  return AConnection(algebroid, ConnectionKind::zero_on_trivial_anchor, "trivial",
                     std::move(product), true);
}

AConnection coefficient_connection(AlgebroidPtr algebroid, std::vector<Polynomial> gamma,
                                   std::string name) {
  const int k = algebroid->fiber_dim();
  if (static_cast<int>(gamma.size()) != k * k * k) {
    throw InputError("connection coefficients need k^3 = " + std::to_string(k * k * k) +
                     " entries, got " + std::to_string(gamma.size()));
  }
  for (const auto& p : gamma) {
    if (p.num_vars() != algebroid->num_vars()) {
      throw InputError("connection coefficient polynomial has wrong arity");
    }
  }
  const Section table = Section::from_polynomials(std::move(gamma));
  auto product = [alg = algebroid, table, k](const Section& X, const Section& Y) {
    const int depth = std::max(X.fd_depth(), Differentiator::derivative_depth(Y));
    return Section(
        k,
        [alg, table, k, X, Y](const Vec& x) -> Vec {
          const Vec a = X(x);
          const Vec b = Y(x);
          const Vec g = table(x);
          Vec out = alg->diff().along_unchecked(Y, x, alg->anchor(a, x));
          for (int i = 0; i < k; ++i) {
            if (a[i] == 0.0) continue;
            for (int j = 0; j < k; ++j) {
              const double ab = a[i] * b[j];
              const double* row = g.data() + (i * k + j) * k;
              for (int l = 0; l < k; ++l) out[l] += ab * row[l];
            }
          }
          return alg->admissible(out, x);
        },
        depth);
  };
  return AConnection(algebroid, ConnectionKind::coefficient, std::move(name), std::move(product),
                     false);
}

AConnection random_coefficient_connection(AlgebroidPtr algebroid, std::uint64_t seed, int degree,
                                          double scale) {
  std::mt19937_64 rng(seed);
  const int k = algebroid->fiber_dim();
  std::vector<Polynomial> gamma;
  for (int i = 0; i < k * k * k; ++i) {
    gamma.push_back(Polynomial::random(algebroid->num_vars(), degree, rng, scale));
  }
  return coefficient_connection(std::move(algebroid), std::move(gamma),
                                "random_coefficient_" + std::to_string(seed));
}

AConnection dual(const AConnection& conn) {
  if (!conn.algebroid().has_bracket()) {
    throw UnsupportedError("dual connection needs a section bracket on '" +
                           conn.algebroid().name() + "'");
  }
  auto product = [conn](const Section& X, const Section& Y) {
    return conn(Y, X) + conn.algebroid().bracket(X, Y);
  };
  return AConnection(conn.algebroid_ptr(), ConnectionKind::dual, "dual(" + conn.name() + ")",
                     std::move(product), false);
}

AConnection symmetrize(const AConnection& conn) {
  const AConnection bar = dual(conn);
  auto product = [conn, bar](const Section& X, const Section& Y) {
    return (conn(X, Y) + bar(X, Y)) * 0.5;
  };
  return AConnection(conn.algebroid_ptr(), ConnectionKind::symmetrized,
                     "symmetrize(" + conn.name() + ")", std::move(product), false);
}

AConnection so3_minus_connection(AlgebroidPtr tangent_so3) {
  if (tangent_so3->kind() != AlgebroidKind::tangent || tangent_so3->base().name() != "so3_group") {
    throw InputError("the (-)-connection is defined on the tangent algebroid of so3_group");
  }
  auto product = [alg = tangent_so3](const Section& X, const Section& Y) {
    const int depth = std::max(X.fd_depth(), Differentiator::derivative_depth(Y));
    return Section(
        9,
        [alg, X, Y](const Vec& x) -> Vec {
          const Vec xv = X(x);
          const Eigen::Matrix3d r = as_matrix3(x);
          // D(R^T Y)[X] = X^T Y + R^T DY[X], then multiply by R.
          const Vec dy = alg->diff().along_unchecked(Y, x, xv);
          const Eigen::Matrix3d out = r * as_matrix3(xv).transpose() * as_matrix3(Y(x));
          return alg->admissible(Vec(dy + as_vector9(out)), x);
        },
        depth);
  };
  return AConnection(tangent_so3, ConnectionKind::custom, "so3_minus", std::move(product), false);
}

TensorCalculus::TensorCalculus(AConnection conn) : conn_(std::move(conn)) {}

Section TensorCalculus::bracket(const Section& X, const Section& Y) const {
  return conn_.algebroid().bracket(X, Y);
}

Section TensorCalculus::torsion(const Section& X, const Section& Y) const {
  return product(X, Y) - product(Y, X) - bracket(X, Y);
}

Section TensorCalculus::curvature(const Section& X, const Section& Y, const Section& Z) const {
  return product(X, product(Y, Z)) - product(Y, product(X, Z)) - product(bracket(X, Y), Z);
}

Section TensorCalculus::nabla_T(const Section& Z, const Section& X, const Section& Y) const {
  return product(Z, torsion(X, Y)) - torsion(product(Z, X), Y) - torsion(X, product(Z, Y));
}

Section TensorCalculus::nabla_R(const Section& Z, const Section& X, const Section& Y,
                                const Section& W) const {
  return product(Z, curvature(X, Y, W)) - curvature(product(Z, X), Y, W) -
         curvature(X, product(Z, Y), W) - curvature(X, Y, product(Z, W));
}

Section TensorCalculus::associator(const Section& X, const Section& Y, const Section& Z) const {
  return product(X, product(Y, Z)) - product(product(X, Y), Z);
}

Section TensorCalculus::triple_bracket(const Section& X, const Section& Y,
                                       const Section& Z) const {
  return associator(X, Y, Z) - associator(Y, X, Z);
}

Vec curvature(const AConnection& conn, const Section& X, const Section& Y, const Section& Z,
              const Vec& x) {
  return TensorCalculus(conn).curvature(X, Y, Z)(x);
}

Vec torsion(const AConnection& conn, const Section& X, const Section& Y, const Vec& x) {
  return TensorCalculus(conn).torsion(X, Y)(x);
}

Vec nabla_T(const AConnection& conn, const Section& Z, const Section& X, const Section& Y,
            const Vec& x) {
  return TensorCalculus(conn).nabla_T(Z, X, Y)(x);
}

Vec nabla_R(const AConnection& conn, const Section& Z, const Section& X, const Section& Y,
            const Section& W, const Vec& x) {
  return TensorCalculus(conn).nabla_R(Z, X, Y, W)(x);
}

Vec associator(const AConnection& conn, const Section& X, const Section& Y, const Section& Z,
               const Vec& x) {
  return TensorCalculus(conn).associator(X, Y, Z)(x);
}

Vec triple_bracket(const AConnection& conn, const Section& X, const Section& Y,
                   const Section& Z, const Vec& x) {
  return TensorCalculus(conn).triple_bracket(X, Y, Z)(x);
}

}  // namespace alab
