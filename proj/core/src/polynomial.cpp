#include "alab/polynomial.hpp"

#include <cmath>
#include <sstream>

namespace alab {

namespace {

// Enumerates all exponent vectors of total degree <= max_degree.
void enumerate_monomials(int num_vars, int max_degree, int var, Polynomial::Exponents& current,
                         int used, std::vector<Polynomial::Exponents>& out) {
  if (var == num_vars) {
    out.push_back(current);
    return;
  }
  for (int e = 0; e + used <= max_degree; ++e) {
    current[var] = e;
    enumerate_monomials(num_vars, max_degree, var + 1, current, used + e, out);
  }
  current[var] = 0;
}

}  // namespace

Polynomial Polynomial::constant(int num_vars, double value) {
  Polynomial p(num_vars);
  p.add_term(Exponents(num_vars, 0), value);
  return p;
}

Polynomial Polynomial::variable(int num_vars, int index) {
  if (index < 0 || index >= num_vars) throw InputError("polynomial variable index out of range");
  Polynomial p(num_vars);
  Exponents e(num_vars, 0);
  e[index] = 1;
  p.add_term(e, 1.0);
  return p;
}

Polynomial Polynomial::random(int num_vars, int max_degree, std::mt19937_64& rng, double scale) {
  std::uniform_real_distribution<double> coeff(-scale, scale);
  std::vector<Exponents> monomials;
  Exponents current(num_vars, 0);
  enumerate_monomials(num_vars, max_degree, 0, current, 0, monomials);
  Polynomial p(num_vars);
  for (const auto& m : monomials) p.add_term(m, coeff(rng));
  return p;
}

Polynomial Polynomial::from_monomials(int num_vars,
                                      const std::map<std::string, double>& monomials) {
  Polynomial p(num_vars);
  for (const auto& [key, coefficient] : monomials) {
    Exponents e(num_vars, 0);
    std::istringstream in(key);
    std::string factor;
    while (in >> factor) {
      if (factor == "1") continue;
      if (factor.size() < 2 || factor[0] != 'x') {
        throw InputError("bad monomial factor '" + factor + "' in '" + key + "'");
      }
      const auto caret = factor.find('^');
      int index = 0;
      int power = 1;
      try {
        index = std::stoi(factor.substr(1, caret == std::string::npos ? std::string::npos
                                                                       : caret - 1));
        if (caret != std::string::npos) power = std::stoi(factor.substr(caret + 1));
      } catch (const std::exception&) {
        throw InputError("bad monomial factor '" + factor + "' in '" + key + "'");
      }
      if (index < 1 || index > num_vars || power < 0) {
        throw InputError("monomial '" + key + "' references x" + std::to_string(index) +
                         " but the ambient space has " + std::to_string(num_vars) +
                         " coordinates");
      }
      e[index - 1] += power;
    }
    p.add_term(e, coefficient);
  }
  return p;
}

int Polynomial::degree() const {
  int d = 0;
  for (const auto& [e, c] : terms_) {
    int total = 0;
    for (int v : e) total += v;
    d = std::max(d, total);
  }
  return d;
}

void Polynomial::add_term(const Exponents& exps, double coefficient) {
  if (static_cast<int>(exps.size()) != num_vars_) throw InputError("monomial arity mismatch");
  if (coefficient == 0.0) return;
  auto [it, inserted] = terms_.emplace(exps, coefficient);
  if (!inserted) {
    it->second += coefficient;
    if (it->second == 0.0) terms_.erase(it);
  }
}

double Polynomial::operator()(const Vec& x) const {
  double sum = 0.0;
  for (const auto& [e, c] : terms_) {
    double term = c;
    for (int i = 0; i < num_vars_; ++i) {
      for (int k = 0; k < e[i]; ++k) term *= x[i];
    }
    sum += term;
  }
  return sum;
}

Vec Polynomial::gradient(const Vec& x) const {
  Vec g = Vec::Zero(num_vars_);
  for (const auto& [e, c] : terms_) {
    for (int i = 0; i < num_vars_; ++i) {
      if (e[i] == 0) continue;
      double term = c * e[i];
      for (int j = 0; j < num_vars_; ++j) {
        const int power = (j == i) ? e[j] - 1 : e[j];
        for (int k = 0; k < power; ++k) term *= x[j];
      }
      g[i] += term;
    }
  }
  return g;
}

Polynomial Polynomial::derivative(int var) const {
  Polynomial d(num_vars_);
  for (const auto& [e, c] : terms_) {
    if (e[var] == 0) continue;
    Exponents de = e;
    de[var] -= 1;
    d.add_term(de, c * e[var]);
  }
  return d;
}

Polynomial Polynomial::operator+(const Polynomial& other) const {
  if (other.num_vars_ != num_vars_) throw InputError("polynomial arity mismatch");
  Polynomial out = *this;
  for (const auto& [e, c] : other.terms_) out.add_term(e, c);
  return out;
}

Polynomial Polynomial::operator-(const Polynomial& other) const { return *this + other * -1.0; }

Polynomial Polynomial::operator*(const Polynomial& other) const {
  if (other.num_vars_ != num_vars_) throw InputError("polynomial arity mismatch");
  Polynomial out(num_vars_);
  for (const auto& [e1, c1] : terms_) {
    for (const auto& [e2, c2] : other.terms_) {
      Exponents e(num_vars_);
      for (int i = 0; i < num_vars_; ++i) e[i] = e1[i] + e2[i];
      out.add_term(e, c1 * c2);
    }
  }
  return out;
}

Polynomial Polynomial::operator*(double s) const {
  Polynomial out(num_vars_);
  for (const auto& [e, c] : terms_) out.add_term(e, c * s);
  return out;
}

std::map<std::string, double> Polynomial::to_monomials() const {
  std::map<std::string, double> out;
  for (const auto& [e, c] : terms_) {
    std::string key;
    for (int i = 0; i < num_vars_; ++i) {
      if (e[i] == 0) continue;
      if (!key.empty()) key += ' ';
      key += 'x' + std::to_string(i + 1);
      if (e[i] > 1) key += '^' + std::to_string(e[i]);
    }
    out[key.empty() ? "1" : key] = c;
  }
  return out;
}

SmoothScalar::SmoothScalar(Polynomial p)
    : name_("polynomial"), poly_(std::move(p)) {
  fn_ = [poly = *poly_](const Vec& x) { return poly(x); };
}

SmoothScalar::SmoothScalar(std::string name, Fn fn) : name_(std::move(name)), fn_(std::move(fn)) {}

}  // namespace alab
