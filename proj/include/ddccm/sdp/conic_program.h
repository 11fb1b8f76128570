#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace ddccm {

/// Upper-triangle entry of a symmetric matrix: sets A(i, j) = A(j, i) = value.
struct SymEntry {
  int i;
  int j;
  double value;
};
using SymSparse = std::vector<SymEntry>;

/// <A, X> for symmetric A given by its upper triangle.
double InnerProduct(const SymSparse& A, const Eigen::MatrixXd& X);
Eigen::MatrixXd ToDense(const SymSparse& A, int dim);

/// min  sum_b <C_b, X_b> + c_w' w
/// s.t. sum_b sum_a P(r, a) <A_a, X_b> + (G w)_r = b_r  for every row r,
///      X_b PSD, w free.
///
/// Each PSD block carries a list of atoms A_a (fixed symmetric matrices).
/// Rows and the objective only see a block through its atom values
/// <A_a, X_b>, which lets the solver form the Schur complement per block in
/// atom coordinates.
class ConicProgram {
 public:
  int AddPsdBlock(int dim, std::string name = "");
  /// Entries must satisfy 0 <= i <= j < dim; repeated entries accumulate.
  int AddAtom(int block, SymSparse entries);
  int AddFreeVariable(std::string name = "");
  int AddRow(double rhs);

  void AddAtomCoefficient(int row, int atom, double c);
  void AddFreeCoefficient(int row, int var, double c);
  void AddObjectiveAtom(int atom, double c);
  void AddObjectiveFree(int var, double c);
  void SetRhs(int row, double rhs) { rhs_.at(row) = rhs; }

  int num_blocks() const { return static_cast<int>(block_dims_.size()); }
  int block_dim(int b) const { return block_dims_.at(b); }
  const std::string& block_name(int b) const { return block_names_.at(b); }
  int total_psd_dim() const;
  int num_atoms() const { return static_cast<int>(atoms_.size()); }
  int atom_block(int a) const { return atom_block_.at(a); }
  const SymSparse& atom(int a) const { return atoms_.at(a); }
  int num_free() const { return static_cast<int>(free_names_.size()); }
  const std::string& free_name(int f) const { return free_names_.at(f); }
  int num_rows() const { return static_cast<int>(rhs_.size()); }
  double rhs(int r) const { return rhs_.at(r); }
  Eigen::VectorXd rhs_vector() const;

  /// Row terms in insertion order; duplicates are summed by consumers.
  const std::vector<std::pair<int, double>>& row_atoms(int r) const {
    return row_atoms_.at(r);
  }
  const std::vector<std::pair<int, double>>& row_free(int r) const {
    return row_free_.at(r);
  }
  const std::vector<std::pair<int, double>>& objective_atoms() const {
    return obj_atoms_;
  }
  const std::vector<std::pair<int, double>>& objective_free() const {
    return obj_free_;
  }

  /// <A_a, X_block(a)> for every atom.
  Eigen::VectorXd AtomValues(const std::vector<Eigen::MatrixXd>& X) const;
  /// A(X) + G w.
  Eigen::VectorXd EvaluateRows(const std::vector<Eigen::MatrixXd>& X,
                               const Eigen::VectorXd& w) const;
  double EvaluateObjective(const std::vector<Eigen::MatrixXd>& X,
                           const Eigen::VectorXd& w) const;
  /// Dense objective matrix C_b.
  Eigen::MatrixXd ObjectiveMatrix(int block) const;
  /// sum_r y_r A_r restricted to block b, i.e. the adjoint map.
  Eigen::MatrixXd Adjoint(int block, const Eigen::VectorXd& y) const;
  /// G' y.
  Eigen::VectorXd AdjointFree(const Eigen::VectorXd& y) const;

 private:
  void CheckRow(int row) const;

  std::vector<int> block_dims_;
  std::vector<std::string> block_names_;
  std::vector<SymSparse> atoms_;
  std::vector<int> atom_block_;
  std::vector<std::string> free_names_;
  std::vector<double> rhs_;
  std::vector<std::vector<std::pair<int, double>>> row_atoms_;
  std::vector<std::vector<std::pair<int, double>>> row_free_;
  std::vector<std::pair<int, double>> obj_atoms_;
  std::vector<std::pair<int, double>> obj_free_;
};

}  // namespace ddccm
