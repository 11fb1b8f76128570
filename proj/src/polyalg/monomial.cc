#include "ddccm/polyalg/monomial.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace ddccm {

Monomial::Monomial(std::vector<int> exponents)
    : exponents_(std::move(exponents)) {
  for (int e : exponents_) {
    if (e < 0) throw std::invalid_argument("Monomial: negative exponent");
  }
  degree_ = std::accumulate(exponents_.begin(), exponents_.end(), 0);
}

Monomial Monomial::Constant(int num_vars) {
  return Monomial(std::vector<int>(num_vars, 0));
}

Monomial Monomial::Variable(int num_vars, int index, int power) {
  if (index < 0 || index >= num_vars) {
    throw std::out_of_range("Monomial::Variable: index out of range");
  }
  std::vector<int> e(num_vars, 0);
  e[index] = power;
  return Monomial(std::move(e));
}

double Monomial::Evaluate(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  if (x.size() != num_vars()) {
    throw std::invalid_argument("Monomial::Evaluate: dimension mismatch");
  }
  double v = 1.0;
  for (int i = 0; i < num_vars(); ++i) {
    for (int k = 0; k < exponents_[i]; ++k) v *= x(i);
  }
  return v;
}

std::pair<int, Monomial> Monomial::Differentiate(int var) const {
  const int e = exponents_.at(var);
  if (e == 0) return {0, Constant(num_vars())};
  std::vector<int> d = exponents_;
  d[var] -= 1;
  return {e, Monomial(std::move(d))};
}

Monomial Monomial::Embed(int total_vars, int offset) const {
  if (offset < 0 || offset + num_vars() > total_vars) {
    throw std::invalid_argument("Monomial::Embed: does not fit");
  }
  std::vector<int> e(total_vars, 0);
  for (int i = 0; i < num_vars(); ++i) e[offset + i] = exponents_[i];
  return Monomial(std::move(e));
}

Monomial Monomial::operator*(const Monomial& other) const {
  if (num_vars() != other.num_vars()) {
    throw std::invalid_argument("Monomial product: variable count mismatch");
  }
  std::vector<int> e(exponents_);
  for (int i = 0; i < num_vars(); ++i) e[i] += other.exponents_[i];
  return Monomial(std::move(e));
}

bool operator<(const Monomial& a, const Monomial& b) {
  if (a.degree() != b.degree()) return a.degree() < b.degree();
  // Same degree: the lexicographically larger exponent vector comes first.
  return a.exponents() > b.exponents();
}

std::ostream& operator<<(std::ostream& os, const Monomial& m) {
  if (m.degree() == 0) return os << "1";
  bool first = true;
  for (int i = 0; i < m.num_vars(); ++i) {
    if (m.exponent(i) == 0) continue;
    if (!first) os << "*";
    os << "x" << (i + 1);
    if (m.exponent(i) > 1) os << "^" << m.exponent(i);
    first = false;
  }
  return os;
}

namespace {

void Enumerate(const std::vector<int>& vars, int pos, int remaining,
               std::vector<int>* current, std::vector<Monomial>* out) {
  if (pos == static_cast<int>(vars.size())) {
    out->emplace_back(*current);
    return;
  }
  for (int e = 0; e <= remaining; ++e) {
    (*current)[vars[pos]] = e;
    Enumerate(vars, pos + 1, remaining - e, current, out);
  }
  (*current)[vars[pos]] = 0;
}

}  // namespace

std::vector<Monomial> MonomialsUpToDegree(int num_vars, int degree,
                                          const std::vector<int>& variables) {
  if (degree < 0) return {};
  std::vector<int> current(num_vars, 0);
  std::vector<Monomial> out;
  Enumerate(variables, 0, degree, &current, &out);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Monomial> MonomialsUpToDegree(int num_vars, int degree) {
  std::vector<int> vars(num_vars);
  std::iota(vars.begin(), vars.end(), 0);
  return MonomialsUpToDegree(num_vars, degree, vars);
}

}  // namespace ddccm
