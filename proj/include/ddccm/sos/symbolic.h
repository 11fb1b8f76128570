#pragma once

#include <map>
#include <vector>

#include <Eigen/Dense>

#include "ddccm/polyalg/poly_matrix.h"

namespace ddccm {

/// Index of a scalar decision variable of a ConicProgram: atoms are >= 0,
/// free variable f is encoded as -(f + 1).
inline int AtomVar(int atom) { return atom; }
inline int FreeVar(int f) { return -(f + 1); }

/// Numeric values of all decision variables of a solved program.
struct VariableValues {
  Eigen::VectorXd atoms;
  Eigen::VectorXd free;
  double operator()(int var) const {
    return var >= 0 ? atoms(var) : free(-var - 1);
  }
};

/// constant + sum_v coefficient_v * v.
class LinearExpr {
 public:
  LinearExpr() = default;
  explicit LinearExpr(double constant) : constant_(constant) {}
  static LinearExpr Variable(int var, double coefficient = 1.0);

  double constant() const { return constant_; }
  const std::map<int, double>& terms() const { return terms_; }
  bool IsZero() const { return constant_ == 0.0 && terms_.empty(); }
  bool IsConstant() const { return terms_.empty(); }

  void AddTerm(int var, double c);
  LinearExpr& AddScaled(const LinearExpr& other, double s);
  LinearExpr& operator+=(const LinearExpr& other) { return AddScaled(other, 1.0); }
  LinearExpr& operator-=(const LinearExpr& other) { return AddScaled(other, -1.0); }
  LinearExpr& operator*=(double s);

  double Evaluate(const VariableValues& values) const;

 private:
  double constant_{0.0};
  std::map<int, double> terms_;
};

/// Matrix whose entries are polynomials with affine coefficients in the
/// decision variables.
class SymbolicPolyMatrix {
 public:
  using Entry = std::map<Monomial, LinearExpr>;

  SymbolicPolyMatrix() = default;
  SymbolicPolyMatrix(int rows, int cols, int num_vars);
  static SymbolicPolyMatrix FromNumeric(const PolyMatrix& P);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int num_vars() const { return num_vars_; }
  const Entry& operator()(int i, int j) const { return entries_[i * cols_ + j]; }

  /// Adds `coefficient * m` to entry (i, j).
  void AddTerm(int i, int j, const Monomial& m, const LinearExpr& coefficient);
  /// Adds `scale * p` to entry (i, j).
  void AddPolynomial(int i, int j, const Polynomial& p, double scale = 1.0);
  /// Adds `s * P` where P is numeric.
  void AddNumeric(const PolyMatrix& P, double s = 1.0);
  /// Adds `s * other`.
  void AddScaled(const SymbolicPolyMatrix& other, double s);
  /// Adds `(e * q(x)) * M`: affine scalar e, numeric polynomial q, constant M.
  void AddOuter(const LinearExpr& e, const Polynomial& q,
                const Eigen::MatrixXd& M);

  SymbolicPolyMatrix operator+(const SymbolicPolyMatrix& o) const;
  SymbolicPolyMatrix operator-(const SymbolicPolyMatrix& o) const;
  SymbolicPolyMatrix operator*(double s) const;
  /// Entry-wise product with a numeric polynomial.
  SymbolicPolyMatrix operator*(const Polynomial& p) const;
  /// this * P and P * this for numeric P.
  SymbolicPolyMatrix RightMultiply(const PolyMatrix& P) const;
  SymbolicPolyMatrix LeftMultiply(const PolyMatrix& P) const;
  SymbolicPolyMatrix Transpose() const;
  SymbolicPolyMatrix Differentiate(int var) const;

  /// Max monomial degree over terms with a non-zero affine coefficient; -1
  /// when identically zero.
  int degree() const;
  /// Substitutes values for the decision variables.
  PolyMatrix Evaluate(const VariableValues& values, bool symmetric) const;

 private:
  Entry& at(int i, int j) { return entries_[i * cols_ + j]; }

  int rows_{0};
  int cols_{0};
  int num_vars_{0};
  std::vector<Entry> entries_;
};

}  // namespace ddccm
