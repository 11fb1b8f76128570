#include "ddccm/sos/gram.h"

#include <map>
#include <ostream>
#include <set>
#include <stdexcept>
#include <tuple>

namespace ddccm {

namespace {

void CheckBasis(int num_vars, const std::vector<Monomial>& basis) {
  if (basis.empty()) throw std::invalid_argument("empty Gram basis");
  std::set<Monomial> seen;
  for (const auto& m : basis) {
    if (m.num_vars() != num_vars) {
      throw std::invalid_argument("basis variable count mismatch");
    }
    if (!seen.insert(m).second) {
      throw std::invalid_argument("repeated Gram basis monomial");
    }
  }
}

std::string MonomialText(const Monomial& m) {
  std::string s = "[";
  for (int i = 0; i < m.num_vars(); ++i) {
    if (i) s += ",";
    s += std::to_string(m.exponent(i));
  }
  return s + "]";
}

using GroupKey = std::tuple<Monomial, int, int>;

// Groups upper-triangle entries of Q by the (monomial, r <= c) coefficient
// they contribute to. A diagonal entry pair (r == c) appears once per
// unordered (p, q) but twice in the expansion, hence weight 1 on the
// symmetric atom; an off-diagonal pair appears once, hence 1/2.
std::map<GroupKey, SymSparse> GramGroups(const std::vector<Monomial>& basis,
                                         int blockdim) {
  const int size = static_cast<int>(basis.size()) * blockdim;
  std::map<GroupKey, SymSparse> groups;
  for (int i = 0; i < size; ++i) {
    for (int j = i; j < size; ++j) {
      const int p = i / blockdim, r = i % blockdim;
      const int q = j / blockdim, c = j % blockdim;
      const double v = (r == c) ? 1.0 : 0.5;
      groups[{basis[p] * basis[q], std::min(r, c), std::max(r, c)}].push_back(
          {i, j, v});
    }
  }
  return groups;
}

}  // namespace

GramBlock GramParametrize(ConicProgram* program, int num_vars, int blockdim,
                          const std::vector<Monomial>& basis,
                          const std::string& name, bool with_trace_atom) {
  if (blockdim < 1) throw std::invalid_argument("blockdim must be positive");
  CheckBasis(num_vars, basis);
  GramBlock g;
  g.num_vars = num_vars;
  g.blockdim = blockdim;
  g.basis = basis;
  g.block = program->AddPsdBlock(g.size(), name);
  g.target = SymbolicPolyMatrix(blockdim, blockdim, num_vars);

  auto groups = GramGroups(basis, blockdim);
  for (auto& [key, entries] : groups) {
    const auto& [m, r, c] = key;
    const int atom = program->AddAtom(g.block, std::move(entries));
    g.atoms.push_back(atom);
    g.target.AddTerm(r, c, m, LinearExpr::Variable(AtomVar(atom)));
    if (r != c) g.target.AddTerm(c, r, m, LinearExpr::Variable(AtomVar(atom)));
  }
  if (with_trace_atom) {
    SymSparse diag;
    for (int i = 0; i < g.size(); ++i) diag.push_back({i, i, 1.0});
    g.trace_atom = program->AddAtom(g.block, std::move(diag));
  }
  return g;
}

PolyMatrix Reconstruct(int num_vars, int blockdim,
                       const std::vector<Monomial>& basis,
                       const Eigen::MatrixXd& Q) {
  CheckBasis(num_vars, basis);
  const int size = static_cast<int>(basis.size()) * blockdim;
  if (Q.rows() != size || Q.cols() != size) {
    throw std::invalid_argument("Gram matrix size mismatch");
  }
  const double tol = 1e-12 * std::max(1.0, Q.cwiseAbs().maxCoeff());
  if ((Q - Q.transpose()).cwiseAbs().maxCoeff() > tol) {
    throw std::invalid_argument("Gram matrix is not symmetric");
  }
  PolyMatrix P(blockdim, blockdim, num_vars, /*symmetric=*/true);
  const int nb = static_cast<int>(basis.size());
  for (int r = 0; r < blockdim; ++r) {
    for (int c = r; c < blockdim; ++c) {
      Polynomial entry(num_vars);
      for (int p = 0; p < nb; ++p) {
        for (int q = 0; q < nb; ++q) {
          const double v = Q(p * blockdim + r, q * blockdim + c);
          if (v != 0.0) entry.AddTerm(basis[p] * basis[q], v);
        }
      }
      P.Set(r, c, entry);
    }
  }
  return P;
}

PolyMatrix Reconstruct(const GramBlock& g, const Eigen::MatrixXd& Q) {
  return Reconstruct(g.num_vars, g.blockdim, g.basis, Q);
}

Eigen::MatrixXd MinNormGram(int num_vars, int blockdim,
                            const std::vector<Monomial>& basis,
                            const PolyMatrix& P) {
  CheckBasis(num_vars, basis);
  if (P.rows() != blockdim || P.cols() != blockdim) {
    throw std::invalid_argument("matrix size does not match blockdim");
  }
  const auto groups = GramGroups(basis, blockdim);
  const int size = static_cast<int>(basis.size()) * blockdim;
  Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(size, size);
  for (int r = 0; r < blockdim; ++r) {
    for (int c = r; c < blockdim; ++c) {
      for (const auto& [m, coef] : P(r, c).terms()) {
        auto it = groups.find({m, r, c});
        if (it == groups.end()) {
          throw std::invalid_argument("monomial outside the Gram span");
        }
        // The atoms are mutually orthogonal, so the least-norm Q is a
        // per-atom rescaling.
        double norm2 = 0.0;
        for (const auto& e : it->second) {
          norm2 += (e.i == e.j ? 1.0 : 2.0) * e.value * e.value;
        }
        for (const auto& e : it->second) {
          Q(e.i, e.j) += coef * e.value / norm2;
          if (e.i != e.j) Q(e.j, e.i) += coef * e.value / norm2;
        }
      }
    }
  }
  return Q;
}

LinearConstraintSet EquateZero(ConicProgram* program,
                               const SymbolicPolyMatrix& expr, bool symmetric) {
  if (symmetric && expr.rows() != expr.cols()) {
    throw std::invalid_argument("symmetric identity on a non-square matrix");
  }
  LinearConstraintSet set;
  for (int r = 0; r < expr.rows(); ++r) {
    for (int c = symmetric ? r : 0; c < expr.cols(); ++c) {
      for (const auto& [m, e] : expr(r, c)) {
        if (e.IsZero()) continue;
        const int row = program->AddRow(-e.constant());
        for (const auto& [var, coef] : e.terms()) {
          if (var >= 0) {
            program->AddAtomCoefficient(row, var, coef);
          } else {
            program->AddFreeCoefficient(row, -var - 1, coef);
          }
        }
        set.rows.push_back(row);
        set.origins.push_back({m, r, c});
      }
    }
  }
  return set;
}

Polynomial MarginPolynomial(int num_vars, const std::vector<Monomial>& basis,
                            MarginShape shape) {
  if (shape == MarginShape::kConstant) return Polynomial(num_vars, 1.0);
  Polynomial q(num_vars);
  for (const auto& m : basis) q.AddTerm(m * m, 1.0);
  return q;
}

MarginResult PsdMargin(ConicProgram* program, const SymbolicPolyMatrix& expr,
                       const LinearExpr& margin, MarginShape shape,
                       const std::string& name, bool with_trace_atom,
                       std::optional<std::vector<Monomial>> basis) {
  if (expr.rows() != expr.cols()) {
    throw std::invalid_argument("margin constraint on a non-square matrix");
  }
  const int degree = std::max(expr.degree(), 0);
  if (degree % 2 != 0) {
    throw std::invalid_argument("odd-degree matrix polynomial cannot be SOS");
  }
  if (!basis) basis = MonomialsUpToDegree(expr.num_vars(), degree / 2);
  MarginResult out;
  out.gram = GramParametrize(program, expr.num_vars(), expr.rows(), *basis,
                             name, with_trace_atom);
  SymbolicPolyMatrix residual = expr;
  residual.AddOuter(margin, MarginPolynomial(expr.num_vars(), *basis, shape),
                    -Eigen::MatrixXd::Identity(expr.rows(), expr.rows()));
  residual.AddScaled(out.gram.target, -1.0);
  out.constraints = EquateZero(program, residual, /*symmetric=*/true);
  return out;
}

void DumpProgram(const ConicProgram& program,
                 const std::vector<const GramBlock*>& grams, std::ostream& os) {
  std::map<int, const GramBlock*> by_block;
  for (const GramBlock* g : grams) by_block[g->block] = g;
  os << "blocks " << program.num_blocks() << "\n";
  for (int b = 0; b < program.num_blocks(); ++b) {
    os << "block " << b << " name=" << program.block_name(b)
       << " dim=" << program.block_dim(b);
    auto it = by_block.find(b);
    if (it != by_block.end()) {
      os << " blockdim=" << it->second->blockdim << " basis=";
      for (size_t k = 0; k < it->second->basis.size(); ++k) {
        os << (k ? ";" : "") << MonomialText(it->second->basis[k]);
      }
    }
    os << "\n";
  }
  os << "atoms " << program.num_atoms() << " free " << program.num_free()
     << "\n";
  for (int a = 0; a < program.num_atoms(); ++a) {
    os << "atom " << a << " block " << program.atom_block(a);
    for (const auto& e : program.atom(a)) {
      os << " (" << e.i << "," << e.j << "," << e.value << ")";
    }
    os << "\n";
  }
  os << "rows " << program.num_rows() << "\n";
  for (int r = 0; r < program.num_rows(); ++r) {
    for (const auto& [a, c] : program.row_atoms(r)) {
      os << r << " a" << a << " " << c << "\n";
    }
    for (const auto& [f, c] : program.row_free(r)) {
      os << r << " w" << f << " " << c << "\n";
    }
  }
  os << "rhs\n";
  for (int r = 0; r < program.num_rows(); ++r) {
    if (program.rhs(r) != 0.0) os << r << " " << program.rhs(r) << "\n";
  }
}

VariableValues ValuesOf(const ConicProgram& program,
                        const std::vector<Eigen::MatrixXd>& X,
                        const Eigen::VectorXd& w) {
  return VariableValues{program.AtomValues(X), w};
}

}  // namespace ddccm
