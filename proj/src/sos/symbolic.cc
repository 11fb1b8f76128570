#include "ddccm/sos/symbolic.h"

#include <algorithm>
#include <stdexcept>

namespace ddccm {

LinearExpr LinearExpr::Variable(int var, double coefficient) {
  LinearExpr e;
  e.AddTerm(var, coefficient);
  return e;
}

void LinearExpr::AddTerm(int var, double c) {
  if (c == 0.0) return;
  auto [it, inserted] = terms_.try_emplace(var, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0.0) terms_.erase(it);
  }
}

LinearExpr& LinearExpr::AddScaled(const LinearExpr& other, double s) {
  if (s == 0.0) return *this;
  constant_ += s * other.constant_;
  for (const auto& [v, c] : other.terms_) AddTerm(v, s * c);
  return *this;
}

LinearExpr& LinearExpr::operator*=(double s) {
  if (s == 0.0) {
    constant_ = 0.0;
    terms_.clear();
    return *this;
  }
  constant_ *= s;
  for (auto& [v, c] : terms_) c *= s;
  return *this;
}

double LinearExpr::Evaluate(const VariableValues& values) const {
  double s = constant_;
  for (const auto& [v, c] : terms_) s += c * values(v);
  return s;
}

SymbolicPolyMatrix::SymbolicPolyMatrix(int rows, int cols, int num_vars)
    : rows_(rows), cols_(cols), num_vars_(num_vars), entries_(rows * cols) {
  if (rows < 0 || cols < 0) throw std::invalid_argument("negative dimension");
}

SymbolicPolyMatrix SymbolicPolyMatrix::FromNumeric(const PolyMatrix& P) {
  SymbolicPolyMatrix S(P.rows(), P.cols(), P.num_vars());
  S.AddNumeric(P);
  return S;
}

void SymbolicPolyMatrix::AddTerm(int i, int j, const Monomial& m,
                                 const LinearExpr& coefficient) {
  if (coefficient.IsZero()) return;
  if (m.num_vars() != num_vars_) {
    throw std::invalid_argument("monomial variable count mismatch");
  }
  Entry& e = at(i, j);
  auto it = e.find(m);
  if (it == e.end()) {
    e.emplace(m, coefficient);
  } else {
    it->second += coefficient;
    if (it->second.IsZero()) e.erase(it);
  }
}

void SymbolicPolyMatrix::AddPolynomial(int i, int j, const Polynomial& p,
                                       double scale) {
  for (const auto& [m, c] : p.terms()) AddTerm(i, j, m, LinearExpr(scale * c));
}

void SymbolicPolyMatrix::AddNumeric(const PolyMatrix& P, double s) {
  if (P.rows() != rows_ || P.cols() != cols_) {
    throw std::invalid_argument("dimension mismatch");
  }
  for (int i = 0; i < rows_; ++i) {
    for (int j = 0; j < cols_; ++j) AddPolynomial(i, j, P(i, j), s);
  }
}

void SymbolicPolyMatrix::AddScaled(const SymbolicPolyMatrix& o, double s) {
  if (o.rows_ != rows_ || o.cols_ != cols_) {
    throw std::invalid_argument("dimension mismatch");
  }
  if (s == 0.0) return;
  for (int i = 0; i < rows_; ++i) {
    for (int j = 0; j < cols_; ++j) {
      for (const auto& [m, e] : o(i, j)) {
        LinearExpr scaled = e;
        scaled *= s;
        AddTerm(i, j, m, scaled);
      }
    }
  }
}

void SymbolicPolyMatrix::AddOuter(const LinearExpr& e, const Polynomial& q,
                                  const Eigen::MatrixXd& M) {
  if (M.rows() != rows_ || M.cols() != cols_) {
    throw std::invalid_argument("dimension mismatch");
  }
  for (int i = 0; i < rows_; ++i) {
    for (int j = 0; j < cols_; ++j) {
      if (M(i, j) == 0.0) continue;
      for (const auto& [m, c] : q.terms()) {
        LinearExpr scaled = e;
        scaled *= c * M(i, j);
        AddTerm(i, j, m, scaled);
      }
    }
  }
}

SymbolicPolyMatrix SymbolicPolyMatrix::operator+(
    const SymbolicPolyMatrix& o) const {
  SymbolicPolyMatrix out = *this;
  out.AddScaled(o, 1.0);
  return out;
}

SymbolicPolyMatrix SymbolicPolyMatrix::operator-(
    const SymbolicPolyMatrix& o) const {
  SymbolicPolyMatrix out = *this;
  out.AddScaled(o, -1.0);
  return out;
}

SymbolicPolyMatrix SymbolicPolyMatrix::operator*(double s) const {
  SymbolicPolyMatrix out(rows_, cols_, num_vars_);
  out.AddScaled(*this, s);
  return out;
}

SymbolicPolyMatrix SymbolicPolyMatrix::operator*(const Polynomial& p) const {
  SymbolicPolyMatrix out(rows_, cols_, num_vars_);
  for (int i = 0; i < rows_; ++i) {
    for (int j = 0; j < cols_; ++j) {
      for (const auto& [m, e] : (*this)(i, j)) {
        for (const auto& [pm, pc] : p.terms()) {
          LinearExpr scaled = e;
          scaled *= pc;
          out.AddTerm(i, j, m * pm, scaled);
        }
      }
    }
  }
  return out;
}

SymbolicPolyMatrix SymbolicPolyMatrix::RightMultiply(const PolyMatrix& P) const {
  if (P.rows() != cols_) throw std::invalid_argument("dimension mismatch");
  SymbolicPolyMatrix out(rows_, P.cols(), num_vars_);
  for (int i = 0; i < rows_; ++i) {
    for (int k = 0; k < cols_; ++k) {
      for (int j = 0; j < P.cols(); ++j) {
        const Polynomial& p = P(k, j);
        if (p.IsZero()) continue;
        for (const auto& [m, e] : (*this)(i, k)) {
          for (const auto& [pm, pc] : p.terms()) {
            LinearExpr scaled = e;
            scaled *= pc;
            out.AddTerm(i, j, m * pm, scaled);
          }
        }
      }
    }
  }
  return out;
}

SymbolicPolyMatrix SymbolicPolyMatrix::LeftMultiply(const PolyMatrix& P) const {
  return Transpose().RightMultiply(P.Transpose()).Transpose();
}

SymbolicPolyMatrix SymbolicPolyMatrix::Transpose() const {
  SymbolicPolyMatrix out(cols_, rows_, num_vars_);
  for (int i = 0; i < rows_; ++i) {
    for (int j = 0; j < cols_; ++j) out.at(j, i) = (*this)(i, j);
  }
  return out;
}

SymbolicPolyMatrix SymbolicPolyMatrix::Differentiate(int var) const {
  SymbolicPolyMatrix out(rows_, cols_, num_vars_);
  for (int i = 0; i < rows_; ++i) {
    for (int j = 0; j < cols_; ++j) {
      for (const auto& [m, e] : (*this)(i, j)) {
        const auto [factor, dm] = m.Differentiate(var);
        if (factor == 0) continue;
        LinearExpr scaled = e;
        scaled *= factor;
        out.AddTerm(i, j, dm, scaled);
      }
    }
  }
  return out;
}

int SymbolicPolyMatrix::degree() const {
  int d = -1;
  for (const auto& entry : entries_) {
    for (const auto& [m, e] : entry) {
      if (!e.IsZero()) d = std::max(d, m.degree());
    }
  }
  return d;
}

PolyMatrix SymbolicPolyMatrix::Evaluate(const VariableValues& values,
                                        bool symmetric) const {
  PolyMatrix P(rows_, cols_, num_vars_, symmetric);
  for (int i = 0; i < rows_; ++i) {
    for (int j = symmetric ? i : 0; j < cols_; ++j) {
      Polynomial p(num_vars_);
      for (const auto& [m, e] : (*this)(i, j)) p.AddTerm(m, e.Evaluate(values));
      P.Set(i, j, p);
    }
  }
  return P;
}

}  // namespace ddccm
