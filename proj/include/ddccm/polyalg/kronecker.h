#pragma once

#include <Eigen/Dense>

namespace ddccm {

/// Column-stacking vectorization.
Eigen::VectorXd Vec(const Eigen::Ref<const Eigen::MatrixXd>& X);

/// Evaluates vec(B^T X^T A^T) and (A kron B^T) vec(X^T), checks they agree to
/// 1e-9 relative and returns the first. Throws std::invalid_argument when the
/// shapes are not conformable (A is p x q, X is q x r, B is r x s).
Eigen::VectorXd VecKron(const Eigen::Ref<const Eigen::MatrixXd>& A,
                        const Eigen::Ref<const Eigen::MatrixXd>& B,
                        const Eigen::Ref<const Eigen::MatrixXd>& X);

/// Tr(AB), computed as vec(B)^T vec(A^T). Requires AB square.
double TraceVecIdentity(const Eigen::Ref<const Eigen::MatrixXd>& A,
                        const Eigen::Ref<const Eigen::MatrixXd>& B);

}  // namespace ddccm
