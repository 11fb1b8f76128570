#pragma once

#include <vector>

#include <Eigen/Dense>

#include "ddccm/polyalg/polynomial.h"

namespace ddccm {

/// Dense matrix of polynomials. With the symmetric flag set, writes to (i, j)
/// also write (j, i), so the two entries always agree coefficient-wise.
class PolyMatrix {
 public:
  PolyMatrix() = default;
  PolyMatrix(int rows, int cols, int num_vars, bool symmetric = false);

  static PolyMatrix Constant(const Eigen::MatrixXd& value, int num_vars,
                             bool symmetric = false);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int num_vars() const { return num_vars_; }
  bool symmetric() const { return symmetric_; }
  int degree() const;

  const Polynomial& operator()(int i, int j) const {
    return entries_[index(i, j)];
  }
  void Set(int i, int j, const Polynomial& p);
  void AddTo(int i, int j, const Polynomial& p);

  Eigen::MatrixXd Evaluate(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  PolyMatrix Differentiate(int var) const;
  PolyMatrix Transpose() const;
  PolyMatrix Pruned(double tol) const;
  double MaxAbsCoefficient() const;

  PolyMatrix operator+(const PolyMatrix& other) const;
  PolyMatrix operator-(const PolyMatrix& other) const;
  PolyMatrix operator*(const PolyMatrix& other) const;
  PolyMatrix operator*(double s) const;
  PolyMatrix operator*(const Polynomial& p) const;

 private:
  int index(int i, int j) const { return i * cols_ + j; }

  int rows_{0};
  int cols_{0};
  int num_vars_{0};
  bool symmetric_{false};
  std::vector<Polynomial> entries_;
};

/// Ordered list of distinct state monomials, the regressor phi(x).
class MonomialDictionary {
 public:
  MonomialDictionary() = default;
  /// Throws if entries are empty, repeated or disagree on variable count.
  explicit MonomialDictionary(std::vector<Monomial> entries);

  int size() const { return static_cast<int>(entries_.size()); }
  int num_vars() const { return entries_.empty() ? 0 : entries_[0].num_vars(); }
  int max_degree() const;
  const std::vector<Monomial>& entries() const { return entries_; }
  const Monomial& operator[](int i) const { return entries_.at(i); }

  Eigen::VectorXd Evaluate(const Eigen::Ref<const Eigen::VectorXd>& x) const;

 private:
  std::vector<Monomial> entries_;
};

/// L x n matrix with (k, j) = d phi_k / d x_j.
PolyMatrix Jacobian(const MonomialDictionary& dict);

}  // namespace ddccm
