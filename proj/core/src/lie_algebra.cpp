#include "alab/lie_algebra.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>

namespace alab {

namespace {

constexpr double kAntisymmetryTol = 1e-12;

Mat hat3(const Vec& w) {
  Mat m(3, 3);
  m << 0, -w[2], w[1], w[2], 0, -w[0], -w[1], w[0], 0;
  return m;
}

}  // namespace

LieAlgebra::LieAlgebra(std::string name, int dim, std::vector<double> constants,
                       std::vector<Mat> basis_matrices)
    : name_(std::move(name)), dim_(dim), constants_(std::move(constants)),
      basis_(std::move(basis_matrices)) {
  if (dim_ <= 0) throw InputError("Lie algebra '" + name_ + "': dimension must be positive");
  if (constants_.size() != static_cast<size_t>(dim_ * dim_ * dim_)) {
    throw InputError("Lie algebra '" + name_ + "': expected " + std::to_string(dim_ * dim_ * dim_) +
                     " structure constants, got " + std::to_string(constants_.size()));
  }
  for (int i = 0; i < dim_; ++i) {
    for (int j = 0; j < dim_; ++j) {
      for (int k = 0; k < dim_; ++k) {
        if (std::abs(c(i, j, k) + c(j, i, k)) > kAntisymmetryTol) {
          throw InputError("Lie algebra '" + name_ + "': structure constants not antisymmetric at c[" +
                           std::to_string(i + 1) + "][" + std::to_string(j + 1) + "][" +
                           std::to_string(k + 1) + "]");
        }
      }
    }
  }
  if (!basis_.empty()) {
    if (static_cast<int>(basis_.size()) != dim_) {
      throw InputError("Lie algebra '" + name_ + "': realization needs one matrix per basis element");
    }
    for (const auto& b : basis_) {
      if (b.rows() != b.cols() || b.rows() != basis_.front().rows()) {
        throw InputError("Lie algebra '" + name_ + "': realization matrices must be square and equal size");
      }
    }
  }
}

LieAlgebra LieAlgebra::so3() {
  std::vector<double> c(27, 0.0);
  auto set = [&](int i, int j, int k, double v) {
    c[(i * 3 + j) * 3 + k] = v;
    c[(j * 3 + i) * 3 + k] = -v;
  };
  set(0, 1, 2, 1.0);
  set(1, 2, 0, 1.0);
  set(2, 0, 1, 1.0);
  std::vector<Mat> basis;
  for (int i = 0; i < 3; ++i) basis.push_back(hat3(Vec::Unit(3, i)));
  return LieAlgebra("so3", 3, std::move(c), std::move(basis));
}

LieAlgebra LieAlgebra::se2() {
  // e1 = rotation generator, e2/e3 = translations in x/y, realized as 3x3
  // homogeneous matrices. [e1,e2] = e3, [e1,e3] = -e2, [e2,e3] = 0.
  std::vector<double> c(27, 0.0);
  auto set = [&](int i, int j, int k, double v) {
    c[(i * 3 + j) * 3 + k] = v;
    c[(j * 3 + i) * 3 + k] = -v;
  };
  set(0, 1, 2, 1.0);
  set(0, 2, 1, -1.0);
  Mat e1 = Mat::Zero(3, 3), e2 = Mat::Zero(3, 3), e3 = Mat::Zero(3, 3);
  e1(0, 1) = -1.0;
  e1(1, 0) = 1.0;
  e2(0, 2) = 1.0;
  e3(1, 2) = 1.0;
  return LieAlgebra("se2", 3, std::move(c), {e1, e2, e3});
}

LieAlgebra LieAlgebra::heisenberg3() {
  std::vector<double> c(27, 0.0);
  c[(0 * 3 + 1) * 3 + 2] = 1.0;
  c[(1 * 3 + 0) * 3 + 2] = -1.0;
  Mat e1 = Mat::Zero(3, 3), e2 = Mat::Zero(3, 3), e3 = Mat::Zero(3, 3);
  e1(0, 1) = 1.0;
  e2(1, 2) = 1.0;
  e3(0, 2) = 1.0;
  return LieAlgebra("heisenberg3", 3, std::move(c), {e1, e2, e3});
}

LieAlgebra LieAlgebra::abelian(int n) {
  if (n <= 0) throw InputError("abelian algebra needs positive dimension");
  std::vector<Mat> basis;
  for (int i = 0; i < n; ++i) {
    Mat e = Mat::Zero(n, n);
    e(i, i) = 1.0;
    basis.push_back(e);
  }
  return LieAlgebra("abelian" + std::to_string(n), n, std::vector<double>(n * n * n, 0.0),
                    std::move(basis));
}

LieAlgebra LieAlgebra::builtin(const std::string& name) {
  if (name == "so3") return so3();
  if (name == "se2") return se2();
  if (name == "heisenberg3") return heisenberg3();
  if (name.rfind("abelian", 0) == 0 && name.size() > 7) {
    int n = 0;
    try {
      n = std::stoi(name.substr(7));
    } catch (const std::exception&) {
      n = 0;
    }
    if (n > 0 && n <= 16) return abelian(n);
  }
  throw InputError("unknown Lie algebra '" + name + "'");
}

void LieAlgebra::check_element(const Vec& a) const {
  if (a.size() != dim_) {
    throw InputError("element of length " + std::to_string(a.size()) + " does not belong to '" +
                     name_ + "' (dim " + std::to_string(dim_) + ")");
  }
}

Mat LieAlgebra::realize(const Vec& xi) const {
  if (!has_realization()) {
    throw UnsupportedError("Lie algebra '" + name_ + "' has no matrix realization");
  }
  check_element(xi);
  Mat m = Mat::Zero(basis_.front().rows(), basis_.front().cols());
  for (int i = 0; i < dim_; ++i) m += xi[i] * basis_[i];
  return m;
}

Vec LieAlgebra::bracket(const Vec& a, const Vec& b) const {
  check_element(a);
  check_element(b);
  Vec out = Vec::Zero(dim_);
  for (int i = 0; i < dim_; ++i) {
    if (a[i] == 0.0) continue;
    for (int j = 0; j < dim_; ++j) {
      const double ab = a[i] * b[j];
      if (ab == 0.0) continue;
      const double* row = &constants_[(i * dim_ + j) * dim_];
      for (int k = 0; k < dim_; ++k) out[k] += ab * row[k];
    }
  }
  return out;
}

Mat LieAlgebra::ad(const Vec& a) const {
  check_element(a);
  Mat m = Mat::Zero(dim_, dim_);
  for (int i = 0; i < dim_; ++i) {
    for (int j = 0; j < dim_; ++j) {
      for (int k = 0; k < dim_; ++k) m(k, j) += a[i] * c(i, j, k);
    }
  }
  return m;
}

LieAlgebra make_lie_algebra(std::string name, int dim, std::vector<double> constants,
                            std::vector<Mat> basis_matrices, double jacobi_tol) {
  LieAlgebra alg(std::move(name), dim, std::move(constants), std::move(basis_matrices));
  const double residual = verify_jacobi(alg);
  if (residual > jacobi_tol) {
    throw InputError("Lie algebra '" + alg.name() + "' violates the Jacobi identity (residual " +
                     std::to_string(residual) + ")");
  }
  return alg;
}

double verify_jacobi(const LieAlgebra& alg) {
  const int n = alg.dim();
  double worst = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        for (int l = 0; l < n; ++l) {
          double s = 0.0;
          for (int m = 0; m < n; ++m) {
            s += alg.c(i, j, m) * alg.c(m, k, l) + alg.c(j, k, m) * alg.c(m, i, l) +
                 alg.c(k, i, m) * alg.c(m, j, l);
          }
          worst = std::max(worst, std::abs(s));
        }
      }
    }
  }
  return worst;
}

Mat exp_matrix(const LieAlgebra& alg, const Vec& xi) {
  const Mat a = alg.realize(xi);
  if (alg.name() == "so3" && a.rows() == 3) {
    const double theta = xi.norm();
    const Mat I = Mat::Identity(3, 3);
    if (theta == 0.0) return I;
    double s = 0.0;  // sin(theta)/theta
    double c = 0.0;  // (1 - cos(theta))/theta^2
    if (theta < 1e-4) {
      const double t2 = theta * theta;
      s = 1.0 - t2 / 6.0 + t2 * t2 / 120.0;
      c = 0.5 - t2 / 24.0 + t2 * t2 / 720.0;
    } else {
      s = std::sin(theta) / theta;
      c = (1.0 - std::cos(theta)) / (theta * theta);
    }
    return I + s * a + c * a * a;
  }
  return a.exp();
}

Vec dexpinv(const LieAlgebra& alg, const Vec& u, const Vec& v, int order) {
  if (order < 0 || order > 2) {
    throw InputError("dexpinv order must be 0, 1 or 2 (got " + std::to_string(order) + ")");
  }
  alg.check_element(u);
  alg.check_element(v);
  Vec out = v;
  if (order == 0) return out;
  const Vec uv = alg.bracket(u, v);
  out -= 0.5 * uv;
  if (order == 1) return out;
  out += alg.bracket(u, uv) / 12.0;
  return out;
}

Mat killing_form(const LieAlgebra& alg) {
  const int n = alg.dim();
  std::vector<Mat> ads;
  for (int i = 0; i < n; ++i) ads.push_back(alg.ad(alg.basis_vector(i)));
  Mat k(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) k(i, j) = (ads[i] * ads[j]).trace();
  }
  return k;
}

AlgebraInvariants algebra_invariants(const LieAlgebra& alg, double tol) {
  AlgebraInvariants inv;
  const Mat k = killing_form(alg);
  Eigen::SelfAdjointEigenSolver<Mat> eig(0.5 * (k + k.transpose()));
  const double scale = std::max(1.0, eig.eigenvalues().cwiseAbs().maxCoeff());
  for (Eigen::Index i = 0; i < eig.eigenvalues().size(); ++i) {
    const double ev = eig.eigenvalues()[i];
    if (ev > tol * scale) {
      ++inv.killing_positive;
    } else if (ev < -tol * scale) {
      ++inv.killing_negative;
    } else {
      ++inv.killing_zero;
    }
  }
  // Derived algebra = span of all brackets [e_i, e_j].
  const int n = alg.dim();
  Mat span(n, n * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      span.col(i * n + j) = alg.bracket(alg.basis_vector(i), alg.basis_vector(j));
    }
  }
  Eigen::JacobiSVD<Mat> svd(span);
  const auto& sv = svd.singularValues();
  const double top = sv.size() ? sv[0] : 0.0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv[i] > tol * std::max(1.0, top)) ++inv.derived_dim;
  }
  return inv;
}

}  // namespace alab
