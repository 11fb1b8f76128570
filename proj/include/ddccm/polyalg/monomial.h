#pragma once

#include <cstddef>
#include <ostream>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace ddccm {

/// A monomial in a fixed, ordered set of indeterminates, stored as its
/// exponent vector. When a polynomial lives in (x, y), the y exponents follow
/// the x block in the same vector.
class Monomial {
 public:
  Monomial() = default;
  explicit Monomial(std::vector<int> exponents);

  /// The constant monomial 1 in `num_vars` indeterminates.
  static Monomial Constant(int num_vars);
  /// x_index^power.
  static Monomial Variable(int num_vars, int index, int power = 1);

  int num_vars() const { return static_cast<int>(exponents_.size()); }
  int degree() const { return degree_; }
  int exponent(int i) const { return exponents_.at(i); }
  const std::vector<int>& exponents() const { return exponents_; }

  double Evaluate(const Eigen::Ref<const Eigen::VectorXd>& x) const;

  /// d/dx_var of this monomial, as (integer factor, monomial). The factor is
  /// zero when the variable does not appear.
  std::pair<int, Monomial> Differentiate(int var) const;

  /// Re-embeds into `total_vars` indeterminates, shifting exponents so that
  /// variable i becomes variable i + offset.
  Monomial Embed(int total_vars, int offset) const;

  Monomial operator*(const Monomial& other) const;
  bool operator==(const Monomial& other) const {
    return exponents_ == other.exponents_;
  }
  bool operator!=(const Monomial& other) const { return !(*this == other); }

 private:
  std::vector<int> exponents_;
  int degree_{0};
};

/// Graded-lex order: lower total degree first; within a degree, larger
/// exponent of x1 first, then x2, and so on. So 1 < x1 < x2 < x1^2 < x1 x2.
bool operator<(const Monomial& a, const Monomial& b);

std::ostream& operator<<(std::ostream& os, const Monomial& m);

/// All monomials of total degree <= `degree` in `num_vars` indeterminates,
/// sorted in graded-lex order.
std::vector<Monomial> MonomialsUpToDegree(int num_vars, int degree);

/// As above, restricted to monomials that only involve the listed variables.
std::vector<Monomial> MonomialsUpToDegree(int num_vars, int degree,
                                          const std::vector<int>& variables);

}  // namespace ddccm
