#include "ddccm/polyalg/kronecker.h"

#include <cmath>
#include <stdexcept>

namespace ddccm {

Eigen::VectorXd Vec(const Eigen::Ref<const Eigen::MatrixXd>& X) {
  Eigen::VectorXd v(X.size());
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    v.segment(j * X.rows(), X.rows()) = X.col(j);
  }
  return v;
}

namespace {

Eigen::MatrixXd Kron(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
  Eigen::MatrixXd K(A.rows() * B.rows(), A.cols() * B.cols());
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    for (Eigen::Index j = 0; j < A.cols(); ++j) {
      K.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
    }
  }
  return K;
}

}  // namespace

Eigen::VectorXd VecKron(const Eigen::Ref<const Eigen::MatrixXd>& A,
                        const Eigen::Ref<const Eigen::MatrixXd>& B,
                        const Eigen::Ref<const Eigen::MatrixXd>& X) {
  if (X.rows() != A.cols() || B.rows() != X.cols()) {
    throw std::invalid_argument("VecKron: dimension mismatch");
  }
  const Eigen::VectorXd lhs = Vec(B.transpose() * X.transpose() * A.transpose());
  const Eigen::VectorXd rhs = Kron(A, B.transpose()) * Vec(X.transpose());
  const double scale = 1.0 + lhs.lpNorm<Eigen::Infinity>();
  if ((lhs - rhs).lpNorm<Eigen::Infinity>() > 1e-9 * scale) {
    throw std::logic_error("VecKron: identity violated");
  }
  return lhs;
}

double TraceVecIdentity(const Eigen::Ref<const Eigen::MatrixXd>& A,
                        const Eigen::Ref<const Eigen::MatrixXd>& B) {
  if (A.cols() != B.rows() || A.rows() != B.cols()) {
    throw std::invalid_argument("TraceVecIdentity: AB is not square");
  }
  return Vec(B).dot(Vec(A.transpose()));
}

}  // namespace ddccm
