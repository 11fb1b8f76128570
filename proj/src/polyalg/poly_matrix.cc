#include "ddccm/polyalg/poly_matrix.h"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace ddccm {

PolyMatrix::PolyMatrix(int rows, int cols, int num_vars, bool symmetric)
    : rows_(rows),
      cols_(cols),
      num_vars_(num_vars),
      symmetric_(symmetric),
      entries_(static_cast<std::size_t>(rows) * cols, Polynomial(num_vars)) {
  if (symmetric && rows != cols) {
    throw std::invalid_argument("PolyMatrix: symmetric matrix must be square");
  }
}

PolyMatrix PolyMatrix::Constant(const Eigen::MatrixXd& value, int num_vars,
                                bool symmetric) {
  PolyMatrix out(static_cast<int>(value.rows()), static_cast<int>(value.cols()),
                 num_vars, symmetric);
  for (int i = 0; i < out.rows_; ++i) {
    for (int j = 0; j < out.cols_; ++j) {
      if (symmetric && value(i, j) != value(j, i)) {
        throw std::invalid_argument("PolyMatrix::Constant: not symmetric");
      }
      out.entries_[out.index(i, j)] = Polynomial(num_vars, value(i, j));
    }
  }
  return out;
}

int PolyMatrix::degree() const {
  int d = -1;
  for (const auto& p : entries_) d = std::max(d, p.degree());
  return d;
}

void PolyMatrix::Set(int i, int j, const Polynomial& p) {
  if (p.num_vars() != num_vars_ && !(p.IsZero() && p.num_vars() == 0)) {
    throw std::invalid_argument("PolyMatrix::Set: variable count mismatch");
  }
  Polynomial q = p.num_vars() == num_vars_ ? p : Polynomial(num_vars_);
  entries_.at(index(i, j)) = q;
  if (symmetric_) entries_.at(index(j, i)) = q;
}

void PolyMatrix::AddTo(int i, int j, const Polynomial& p) {
  if (symmetric_ && i != j) {
    entries_.at(index(i, j)) += p;
    entries_.at(index(j, i)) += p;
  } else {
    entries_.at(index(i, j)) += p;
  }
}

Eigen::MatrixXd PolyMatrix::Evaluate(
    const Eigen::Ref<const Eigen::VectorXd>& x) const {
  if (x.size() != num_vars_) {
    throw std::invalid_argument("PolyMatrix::Evaluate: dimension mismatch");
  }
  Eigen::MatrixXd out(rows_, cols_);
  for (int i = 0; i < rows_; ++i) {
    for (int j = 0; j < cols_; ++j) {
      if (symmetric_ && j < i) {
        out(i, j) = out(j, i);
      } else {
        out(i, j) = entries_[index(i, j)].Evaluate(x);
      }
    }
  }
  return out;
}

PolyMatrix PolyMatrix::Differentiate(int var) const {
  PolyMatrix out(rows_, cols_, num_vars_, symmetric_);
  for (std::size_t k = 0; k < entries_.size(); ++k) {
    out.entries_[k] = entries_[k].Differentiate(var);
  }
  return out;
}

PolyMatrix PolyMatrix::Transpose() const {
  PolyMatrix out(cols_, rows_, num_vars_, symmetric_);
  for (int i = 0; i < rows_; ++i) {
    for (int j = 0; j < cols_; ++j) {
      out.entries_[out.index(j, i)] = entries_[index(i, j)];
    }
  }
  return out;
}

PolyMatrix PolyMatrix::Pruned(double tol) const {
  PolyMatrix out(*this);
  for (auto& p : out.entries_) p = p.Pruned(tol);
  return out;
}

double PolyMatrix::MaxAbsCoefficient() const {
  double v = 0.0;
  for (const auto& p : entries_) v = std::max(v, p.MaxAbsCoefficient());
  return v;
}

PolyMatrix PolyMatrix::operator+(const PolyMatrix& other) const {
  if (rows_ != other.rows_ || cols_ != other.cols_) {
    throw std::invalid_argument("PolyMatrix +: shape mismatch");
  }
  PolyMatrix out(*this);
  out.symmetric_ = symmetric_ && other.symmetric_;
  for (std::size_t k = 0; k < entries_.size(); ++k) {
    out.entries_[k] += other.entries_[k];
  }
  return out;
}

PolyMatrix PolyMatrix::operator-(const PolyMatrix& other) const {
  return *this + other * -1.0;
}

PolyMatrix PolyMatrix::operator*(const PolyMatrix& other) const {
  if (cols_ != other.rows_) {
    throw std::invalid_argument("PolyMatrix *: shape mismatch");
  }
  PolyMatrix out(rows_, other.cols_, num_vars_, false);
  for (int i = 0; i < rows_; ++i) {
    for (int j = 0; j < other.cols_; ++j) {
      Polynomial acc(num_vars_);
      for (int k = 0; k < cols_; ++k) {
        const Polynomial& a = (*this)(i, k);
        const Polynomial& b = other(k, j);
        if (a.IsZero() || b.IsZero()) continue;
        acc += a * b;
      }
      out.entries_[out.index(i, j)] = std::move(acc);
    }
  }
  return out;
}

PolyMatrix PolyMatrix::operator*(double s) const {
  PolyMatrix out(*this);
  for (auto& p : out.entries_) p *= s;
  return out;
}

PolyMatrix PolyMatrix::operator*(const Polynomial& p) const {
  PolyMatrix out(*this);
  for (auto& e : out.entries_) e = e * p;
  return out;
}

MonomialDictionary::MonomialDictionary(std::vector<Monomial> entries)
    : entries_(std::move(entries)) {
  if (entries_.empty()) {
    throw std::invalid_argument("MonomialDictionary: empty dictionary");
  }
  std::set<Monomial> seen;
  for (const auto& m : entries_) {
    if (m.num_vars() != entries_[0].num_vars()) {
      throw std::invalid_argument(
          "MonomialDictionary: inconsistent variable count");
    }
    if (!seen.insert(m).second) {
      throw std::invalid_argument("MonomialDictionary: duplicate monomial");
    }
  }
}

int MonomialDictionary::max_degree() const {
  int d = 0;
  for (const auto& m : entries_) d = std::max(d, m.degree());
  return d;
}

Eigen::VectorXd MonomialDictionary::Evaluate(
    const Eigen::Ref<const Eigen::VectorXd>& x) const {
  Eigen::VectorXd v(size());
  for (int k = 0; k < size(); ++k) v(k) = entries_[k].Evaluate(x);
  return v;
}

PolyMatrix Jacobian(const MonomialDictionary& dict) {
  const int n = dict.num_vars();
  PolyMatrix J(dict.size(), n, n, false);
  for (int k = 0; k < dict.size(); ++k) {
    for (int j = 0; j < n; ++j) {
      auto [factor, dm] = dict[k].Differentiate(j);
      if (factor != 0) J.Set(k, j, Polynomial(dm, factor));
    }
  }
  return J;
}

}  // namespace ddccm
