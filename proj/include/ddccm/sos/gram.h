#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ddccm/polyalg/monomial.h"
#include "ddccm/polyalg/poly_matrix.h"
#include "ddccm/sdp/conic_program.h"
#include "ddccm/sos/symbolic.h"

namespace ddccm {

/// P(x) = (v(x) ⊗ I)' Q (v(x) ⊗ I) with Q a PSD block of a ConicProgram.
/// Q is indexed as Q(p * blockdim + r, q * blockdim + c) for basis entries
/// p, q and matrix entries r, c.
struct GramBlock {
  int block{-1};
  int num_vars{0};
  int blockdim{1};
  std::vector<Monomial> basis;
  /// One atom per distinct (monomial, r <= c) coefficient of P.
  std::vector<int> atoms;
  /// Atom with value Tr(Q), or -1.
  int trace_atom{-1};
  /// P with coefficients affine in the atoms.
  SymbolicPolyMatrix target;

  int size() const { return static_cast<int>(basis.size()) * blockdim; }
};

/// Adds a PSD block and returns its parametrization. Throws
/// std::invalid_argument on an empty or repeated basis.
GramBlock GramParametrize(ConicProgram* program, int num_vars, int blockdim,
                          const std::vector<Monomial>& basis,
                          const std::string& name = "",
                          bool with_trace_atom = false);

/// Coefficient-wise expansion of (v ⊗ I)' Q (v ⊗ I). Throws
/// std::invalid_argument on a size mismatch or a non-symmetric Q.
PolyMatrix Reconstruct(const GramBlock& g, const Eigen::MatrixXd& Q);
PolyMatrix Reconstruct(int num_vars, int blockdim,
                       const std::vector<Monomial>& basis,
                       const Eigen::MatrixXd& Q);

/// Least-Frobenius-norm symmetric Q with (v ⊗ I)' Q (v ⊗ I) = P. Throws
/// std::invalid_argument when P has a monomial outside the span of v v'.
Eigen::MatrixXd MinNormGram(int num_vars, int blockdim,
                            const std::vector<Monomial>& basis,
                            const PolyMatrix& P);

/// Rows added to a ConicProgram by one polynomial identity.
struct LinearConstraintSet {
  std::vector<int> rows;
  /// (monomial, r, c) coefficient each row matches.
  struct Origin {
    Monomial monomial;
    int r;
    int c;
  };
  std::vector<Origin> origins;
  int size() const { return static_cast<int>(rows.size()); }
};

/// One equality per (monomial, entry) with a non-zero affine coefficient.
/// With `symmetric`, only entries r <= c are matched. A coefficient that is a
/// non-zero constant still yields a row (0 = rhs), which makes the program
/// infeasible.
LinearConstraintSet EquateZero(ConicProgram* program,
                               const SymbolicPolyMatrix& expr, bool symmetric);

enum class MarginShape { kConstant, kBasisSquares };

/// sum_k psi_k(x)^2 over `basis`, or 1 for the constant shape.
Polynomial MarginPolynomial(int num_vars, const std::vector<Monomial>& basis,
                            MarginShape shape);

struct MarginResult {
  GramBlock gram;
  LinearConstraintSet constraints;
};

/// Encodes expr - margin * q(x) * I = Gram, i.e. expr - margin q I is
/// matrix-SOS. The basis defaults to all monomials up to half the degree of
/// expr. Throws std::invalid_argument when expr is not square or has odd
/// degree.
MarginResult PsdMargin(ConicProgram* program, const SymbolicPolyMatrix& expr,
                       const LinearExpr& margin, MarginShape shape,
                       const std::string& name = "",
                       bool with_trace_atom = false,
                       std::optional<std::vector<Monomial>> basis = {});

/// Block list with basis monomials and sizes, then the equality matrix as
/// "row var value" triplets (atoms as a<k>, free variables as w<k>) and the
/// right-hand side.
void DumpProgram(const ConicProgram& program,
                 const std::vector<const GramBlock*>& grams, std::ostream& os);

/// Atom and free values of a solved program.
VariableValues ValuesOf(const ConicProgram& program,
                        const std::vector<Eigen::MatrixXd>& X,
                        const Eigen::VectorXd& w);

}  // namespace ddccm
