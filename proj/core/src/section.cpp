#include "alab/section.hpp"

#include <algorithm>

namespace alab {

// Flat monomial table for fast evaluation of polynomial sections.
struct Section::Compiled {
  int num_vars = 0;
  int max_power = 0;
  std::vector<int> component;
  std::vector<double> coefficient;
  std::vector<int> exponents;  // num_terms x num_vars

  void powers(const Vec& x, std::vector<double>& table) const {
    const int stride = max_power + 1;
    table.assign(static_cast<size_t>(num_vars * stride), 1.0);
    for (int i = 0; i < num_vars; ++i) {
      for (int p = 1; p <= max_power; ++p) table[i * stride + p] = table[i * stride + p - 1] * x[i];
    }
  }

  Vec eval(const Vec& x, int dim) const {
    thread_local std::vector<double> table;
    powers(x, table);
    const int stride = max_power + 1;
    Vec out = Vec::Zero(dim);
    for (size_t t = 0; t < coefficient.size(); ++t) {
      double term = coefficient[t];
      const int* e = &exponents[t * num_vars];
      for (int i = 0; i < num_vars; ++i) term *= table[i * stride + e[i]];
      out[component[t]] += term;
    }
    return out;
  }

  Mat jacobian(const Vec& x, int dim) const {
    thread_local std::vector<double> table;
    powers(x, table);
    const int stride = max_power + 1;
    Mat out = Mat::Zero(dim, num_vars);
    for (size_t t = 0; t < coefficient.size(); ++t) {
      const int* e = &exponents[t * num_vars];
      for (int i = 0; i < num_vars; ++i) {
        if (e[i] == 0) continue;
        double term = coefficient[t] * e[i];
        for (int j = 0; j < num_vars; ++j) {
          term *= table[j * stride + (j == i ? e[j] - 1 : e[j])];
        }
        out(component[t], i) += term;
      }
    }
    return out;
  }
};

Section::Section(int dim, Fn fn, int fd_depth) {
  auto d = std::make_shared<Data>();
  d->dim = dim;
  d->fd_depth = fd_depth;
  d->fn = std::move(fn);
  data_ = std::move(d);
}

Section Section::from_polynomials(std::vector<Polynomial> components) {
  if (components.empty()) throw InputError("polynomial section needs at least one component");
  const int n = components.front().num_vars();
  auto compiled = std::make_shared<Compiled>();
  compiled->num_vars = n;
  for (size_t c = 0; c < components.size(); ++c) {
    if (components[c].num_vars() != n) throw InputError("polynomial section arity mismatch");
    for (const auto& [e, coef] : components[c].terms()) {
      compiled->component.push_back(static_cast<int>(c));
      compiled->coefficient.push_back(coef);
      compiled->exponents.insert(compiled->exponents.end(), e.begin(), e.end());
      for (int p : e) compiled->max_power = std::max(compiled->max_power, p);
    }
  }
  auto d = std::make_shared<Data>();
  d->dim = static_cast<int>(components.size());
  d->fd_depth = 0;
  d->polys = std::move(components);
  d->compiled = compiled;
  const int dim = d->dim;
  d->fn = [compiled, dim](const Vec& x) { return compiled->eval(x, dim); };
  Section s;
  s.data_ = std::move(d);
  return s;
}

Section Section::constant(const Vec& value, int num_vars) {
  std::vector<Polynomial> comps;
  for (Eigen::Index i = 0; i < value.size(); ++i) {
    comps.push_back(Polynomial::constant(num_vars, value[i]));
  }
  return from_polynomials(std::move(comps));
}

Mat Section::jacobian(const Vec& x) const {
  if (!data_->compiled) throw UnsupportedError("exact Jacobian requires a polynomial section");
  return data_->compiled->jacobian(x, data_->dim);
}

Section Section::operator+(const Section& other) const {
  if (other.dim() != dim()) throw InputError("section dimension mismatch in sum");
  if (polynomials() && other.polynomials()) {
    std::vector<Polynomial> out;
    for (int i = 0; i < dim(); ++i) out.push_back((*polynomials())[i] + (*other.polynomials())[i]);
    return from_polynomials(std::move(out));
  }
  return Section(dim(), [a = *this, b = other](const Vec& x) -> Vec { return a(x) + b(x); },
                 combined_depth({this, &other}));
}

Section Section::operator-(const Section& other) const { return *this + other * -1.0; }

Section Section::operator*(double s) const {
  if (polynomials()) {
    std::vector<Polynomial> out;
    for (const auto& p : *polynomials()) out.push_back(p * s);
    return from_polynomials(std::move(out));
  }
  return Section(dim(), [a = *this, s](const Vec& x) -> Vec { return s * a(x); }, fd_depth());
}

Section Section::times(const SmoothScalar& f) const {
  if (polynomials() && f.polynomial()) {
    std::vector<Polynomial> out;
    for (const auto& p : *polynomials()) out.push_back(p * *f.polynomial());
    return from_polynomials(std::move(out));
  }
  return Section(dim(), [a = *this, f](const Vec& x) -> Vec { return f(x) * a(x); }, fd_depth());
}

int combined_depth(std::initializer_list<const Section*> parts) {
  int d = 0;
  for (const Section* s : parts) d = std::max(d, s->fd_depth());
  return d;
}

double sup_norm(const Section& s, const std::vector<Vec>& points) {
  double m = 0.0;
  for (const auto& x : points) m = std::max(m, s(x).norm());
  return m;
}

}  // namespace alab
