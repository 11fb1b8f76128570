#include "ddccm/sdp/conic_program.h"

#include <stdexcept>

namespace ddccm {

double InnerProduct(const SymSparse& A, const Eigen::MatrixXd& X) {
  double s = 0.0;
  for (const auto& e : A) {
    s += e.i == e.j ? e.value * X(e.i, e.i)
                    : e.value * (X(e.i, e.j) + X(e.j, e.i));
  }
  return s;
}

Eigen::MatrixXd ToDense(const SymSparse& A, int dim) {
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(dim, dim);
  for (const auto& e : A) {
    M(e.i, e.j) += e.value;
    if (e.i != e.j) M(e.j, e.i) += e.value;
  }
  return M;
}

int ConicProgram::AddPsdBlock(int dim, std::string name) {
  if (dim <= 0) throw std::invalid_argument("block dimension must be > 0");
  block_dims_.push_back(dim);
  block_names_.push_back(std::move(name));
  return num_blocks() - 1;
}

int ConicProgram::AddAtom(int block, SymSparse entries) {
  const int dim = block_dim(block);
  for (const auto& e : entries) {
    if (e.i < 0 || e.i > e.j || e.j >= dim) {
      throw std::invalid_argument("atom entry outside upper triangle");
    }
  }
  atoms_.push_back(std::move(entries));
  atom_block_.push_back(block);
  return num_atoms() - 1;
}

int ConicProgram::AddFreeVariable(std::string name) {
  free_names_.push_back(std::move(name));
  return num_free() - 1;
}

int ConicProgram::AddRow(double rhs) {
  rhs_.push_back(rhs);
  row_atoms_.emplace_back();
  row_free_.emplace_back();
  return num_rows() - 1;
}

void ConicProgram::CheckRow(int row) const {
  if (row < 0 || row >= num_rows()) throw std::out_of_range("row index");
}

void ConicProgram::AddAtomCoefficient(int row, int atom, double c) {
  CheckRow(row);
  if (atom < 0 || atom >= num_atoms()) throw std::out_of_range("atom index");
  if (c != 0.0) row_atoms_[row].emplace_back(atom, c);
}

void ConicProgram::AddFreeCoefficient(int row, int var, double c) {
  CheckRow(row);
  if (var < 0 || var >= num_free()) throw std::out_of_range("free index");
  if (c != 0.0) row_free_[row].emplace_back(var, c);
}

void ConicProgram::AddObjectiveAtom(int atom, double c) {
  if (atom < 0 || atom >= num_atoms()) throw std::out_of_range("atom index");
  if (c != 0.0) obj_atoms_.emplace_back(atom, c);
}

void ConicProgram::AddObjectiveFree(int var, double c) {
  if (var < 0 || var >= num_free()) throw std::out_of_range("free index");
  if (c != 0.0) obj_free_.emplace_back(var, c);
}

int ConicProgram::total_psd_dim() const {
  int s = 0;
  for (int d : block_dims_) s += d;
  return s;
}

Eigen::VectorXd ConicProgram::rhs_vector() const {
  return Eigen::Map<const Eigen::VectorXd>(rhs_.data(), num_rows());
}

Eigen::VectorXd ConicProgram::AtomValues(
    const std::vector<Eigen::MatrixXd>& X) const {
  if (static_cast<int>(X.size()) != num_blocks()) {
    throw std::invalid_argument("block count mismatch");
  }
  Eigen::VectorXd v(num_atoms());
  for (int a = 0; a < num_atoms(); ++a) {
    v(a) = InnerProduct(atoms_[a], X[atom_block_[a]]);
  }
  return v;
}

Eigen::VectorXd ConicProgram::EvaluateRows(
    const std::vector<Eigen::MatrixXd>& X, const Eigen::VectorXd& w) const {
  const Eigen::VectorXd av = AtomValues(X);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(num_rows());
  for (int r = 0; r < num_rows(); ++r) {
    for (const auto& [a, c] : row_atoms_[r]) out(r) += c * av(a);
    for (const auto& [f, c] : row_free_[r]) out(r) += c * w(f);
  }
  return out;
}

double ConicProgram::EvaluateObjective(const std::vector<Eigen::MatrixXd>& X,
                                       const Eigen::VectorXd& w) const {
  double s = 0.0;
  for (const auto& [a, c] : obj_atoms_) {
    s += c * InnerProduct(atoms_[a], X[atom_block_[a]]);
  }
  for (const auto& [f, c] : obj_free_) s += c * w(f);
  return s;
}

Eigen::MatrixXd ConicProgram::ObjectiveMatrix(int block) const {
  const int dim = block_dim(block);
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(dim, dim);
  for (const auto& [a, c] : obj_atoms_) {
    if (atom_block_[a] == block) C += c * ToDense(atoms_[a], dim);
  }
  return C;
}

Eigen::MatrixXd ConicProgram::Adjoint(int block,
                                      const Eigen::VectorXd& y) const {
  const int dim = block_dim(block);
  Eigen::VectorXd weight = Eigen::VectorXd::Zero(num_atoms());
  for (int r = 0; r < num_rows(); ++r) {
    for (const auto& [a, c] : row_atoms_[r]) {
      if (atom_block_[a] == block) weight(a) += c * y(r);
    }
  }
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(dim, dim);
  for (int a = 0; a < num_atoms(); ++a) {
    if (atom_block_[a] != block || weight(a) == 0.0) continue;
    for (const auto& e : atoms_[a]) {
      M(e.i, e.j) += weight(a) * e.value;
      if (e.i != e.j) M(e.j, e.i) += weight(a) * e.value;
    }
  }
  return M;
}

Eigen::VectorXd ConicProgram::AdjointFree(const Eigen::VectorXd& y) const {
  Eigen::VectorXd g = Eigen::VectorXd::Zero(num_free());
  for (int r = 0; r < num_rows(); ++r) {
    for (const auto& [f, c] : row_free_[r]) g(f) += c * y(r);
  }
  return g;
}

}  // namespace ddccm
