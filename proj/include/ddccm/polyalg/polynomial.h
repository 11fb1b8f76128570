#pragma once

#include <map>
#include <ostream>
#include <string>

#include <Eigen/Dense>

#include "ddccm/polyalg/monomial.h"

namespace ddccm {

/// Multivariate polynomial with double coefficients. Terms are kept in
/// graded-lex order and exact zeros are never stored.
class Polynomial {
 public:
  using MapType = std::map<Monomial, double>;

  Polynomial() = default;
  explicit Polynomial(int num_vars) : num_vars_(num_vars) {}
  Polynomial(int num_vars, double constant);
  explicit Polynomial(const Monomial& m, double coefficient = 1.0);

  int num_vars() const { return num_vars_; }
  const MapType& terms() const { return terms_; }
  bool IsZero() const { return terms_.empty(); }
  /// -1 for the zero polynomial.
  int degree() const;
  double coefficient(const Monomial& m) const;

  /// Adds `c` to the coefficient of `m`, dropping the term if it cancels.
  void AddTerm(const Monomial& m, double c);

  double Evaluate(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  Polynomial Differentiate(int var) const;
  /// Moves variable i to i + offset in a space of `total_vars` variables.
  Polynomial Embed(int total_vars, int offset) const;
  /// Copy with every coefficient of magnitude below `tol` removed.
  Polynomial Pruned(double tol) const;
  double MaxAbsCoefficient() const;

  Polynomial& operator+=(const Polynomial& other);
  Polynomial& operator-=(const Polynomial& other);
  Polynomial& operator*=(double s);

  friend Polynomial operator+(Polynomial a, const Polynomial& b) {
    return a += b;
  }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) {
    return a -= b;
  }
  friend Polynomial operator*(Polynomial a, double s) { return a *= s; }
  friend Polynomial operator*(double s, Polynomial a) { return a *= s; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  Polynomial operator-() const { return *this * -1.0; }

  bool operator==(const Polynomial& other) const {
    return num_vars_ == other.num_vars_ && terms_ == other.terms_;
  }

 private:
  int num_vars_{0};
  MapType terms_;
};

std::ostream& operator<<(std::ostream& os, const Polynomial& p);

/// Canonical text form: one "e1 e2 ... en : coefficient" line per term in
/// graded-lex order, coefficients with 17 significant digits. The first line
/// is "nvars <n> terms <k>".
std::string ToCanonicalText(const Polynomial& p);
Polynomial ParseCanonicalText(const std::string& text);

}  // namespace ddccm
