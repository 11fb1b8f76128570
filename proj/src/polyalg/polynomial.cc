#include "ddccm/polyalg/polynomial.h"

#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace ddccm {

Polynomial::Polynomial(int num_vars, double constant) : num_vars_(num_vars) {
  AddTerm(Monomial::Constant(num_vars), constant);
}

Polynomial::Polynomial(const Monomial& m, double coefficient)
    : num_vars_(m.num_vars()) {
  AddTerm(m, coefficient);
}

int Polynomial::degree() const {
  if (terms_.empty()) return -1;
  // Graded order: the last key has the largest degree.
  return terms_.rbegin()->first.degree();
}

double Polynomial::coefficient(const Monomial& m) const {
  auto it = terms_.find(m);
  return it == terms_.end() ? 0.0 : it->second;
}

void Polynomial::AddTerm(const Monomial& m, double c) {
  if (m.num_vars() != num_vars_) {
    throw std::invalid_argument("Polynomial::AddTerm: variable count mismatch");
  }
  if (c == 0.0) return;
  auto [it, inserted] = terms_.emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0.0) terms_.erase(it);
  }
}

double Polynomial::Evaluate(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  if (x.size() != num_vars_) {
    throw std::invalid_argument("Polynomial::Evaluate: dimension mismatch");
  }
  double v = 0.0;
  for (const auto& [m, c] : terms_) v += c * m.Evaluate(x);
  return v;
}

Polynomial Polynomial::Differentiate(int var) const {
  Polynomial d(num_vars_);
  for (const auto& [m, c] : terms_) {
    auto [factor, dm] = m.Differentiate(var);
    if (factor != 0) d.AddTerm(dm, c * factor);
  }
  return d;
}

Polynomial Polynomial::Embed(int total_vars, int offset) const {
  Polynomial out(total_vars);
  for (const auto& [m, c] : terms_) out.AddTerm(m.Embed(total_vars, offset), c);
  return out;
}

Polynomial Polynomial::Pruned(double tol) const {
  Polynomial out(num_vars_);
  for (const auto& [m, c] : terms_) {
    if (std::abs(c) >= tol) out.terms_.emplace(m, c);
  }
  return out;
}

double Polynomial::MaxAbsCoefficient() const {
  double v = 0.0;
  for (const auto& [m, c] : terms_) v = std::max(v, std::abs(c));
  return v;
}

Polynomial& Polynomial::operator+=(const Polynomial& other) {
  if (other.num_vars_ != num_vars_) {
    if (terms_.empty() && num_vars_ == 0) {
      num_vars_ = other.num_vars_;
    } else if (!other.terms_.empty() || other.num_vars_ != 0) {
      throw std::invalid_argument("Polynomial +: variable count mismatch");
    }
  }
  for (const auto& [m, c] : other.terms_) AddTerm(m, c);
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& other) {
  return *this += other * -1.0;
}

Polynomial& Polynomial::operator*=(double s) {
  if (s == 0.0) {
    terms_.clear();
    return *this;
  }
  for (auto& [m, c] : terms_) c *= s;
  return *this;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  if (a.num_vars_ != b.num_vars_) {
    throw std::invalid_argument("Polynomial *: variable count mismatch");
  }
  Polynomial out(a.num_vars_);
  for (const auto& [ma, ca] : a.terms_) {
    for (const auto& [mb, cb] : b.terms_) out.AddTerm(ma * mb, ca * cb);
  }
  return out;
}

std::ostream& operator<<(std::ostream& os, const Polynomial& p) {
  if (p.IsZero()) return os << "0";
  bool first = true;
  for (const auto& [m, c] : p.terms()) {
    if (!first) os << (c < 0 ? " - " : " + ");
    else if (c < 0) os << "-";
    const double a = std::abs(c);
    if (m.degree() == 0) {
      os << a;
    } else {
      if (a != 1.0) os << a << "*";
      os << m;
    }
    first = false;
  }
  return os;
}

std::string ToCanonicalText(const Polynomial& p) {
  std::ostringstream os;
  os << "nvars " << p.num_vars() << " terms " << p.terms().size() << "\n";
  os << std::setprecision(17);
  for (const auto& [m, c] : p.terms()) {
    for (int e : m.exponents()) os << e << " ";
    os << ": " << c << "\n";
  }
  return os.str();
}

Polynomial ParseCanonicalText(const std::string& text) {
  std::istringstream is(text);
  std::string tag1, tag2;
  int nvars = 0;
  std::size_t nterms = 0;
  if (!(is >> tag1 >> nvars >> tag2 >> nterms) || tag1 != "nvars" ||
      tag2 != "terms") {
    throw std::invalid_argument("ParseCanonicalText: bad header");
  }
  Polynomial p(nvars);
  for (std::size_t t = 0; t < nterms; ++t) {
    std::vector<int> e(nvars);
    for (int i = 0; i < nvars; ++i) {
      if (!(is >> e[i])) {
        throw std::invalid_argument("ParseCanonicalText: bad exponent");
      }
    }
    std::string colon;
    double c = 0.0;
    if (!(is >> colon >> c) || colon != ":") {
      throw std::invalid_argument("ParseCanonicalText: bad coefficient");
    }
    p.AddTerm(Monomial(std::move(e)), c);
  }
  return p;
}

}  // namespace ddccm
