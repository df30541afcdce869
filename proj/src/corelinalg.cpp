#include "blax/corelinalg.hpp"

#include <Eigen/SVD>

namespace blax {

CMatrix orthonormal_basis(const CMatrix& M, double rel_tol) {
  if (M.cols() == 0 || M.rows() == 0) return CMatrix(M.rows(), 0);
  Eigen::BDCSVD<CMatrix> svd(M, Eigen::ComputeThinU);
  const Eigen::VectorXd& s = svd.singularValues();
  const double cutoff = rel_tol * (s.size() > 0 ? s(0) : 0.0);
  Eigen::Index rank = 0;
  while (rank < s.size() && s(rank) > cutoff) ++rank;
  return svd.matrixU().leftCols(rank);
}

double subspace_gap(const CMatrix& X, const CMatrix& Y, double rel_tol) {
  if (X.rows() != Y.rows()) {
    throw DimensionError("subspace_gap: ambient dimensions differ");
  }
  const CMatrix Qx = orthonormal_basis(X, rel_tol);
  const CMatrix Qy = orthonormal_basis(Y, rel_tol);
  if (Qx.cols() != Qy.cols()) return 1.0;
  if (Qx.cols() == 0) return 0.0;
  // ||P_X - P_Y|| equals ||(I - P_Y) Q_x|| when the dimensions agree.
  const CMatrix residual = Qx - Qy * (Qy.adjoint() * Qx);
  return spectral_norm(residual);
}

double spectral_norm(const CMatrix& M) {
  if (M.size() == 0) return 0.0;
  Eigen::BDCSVD<CMatrix> svd(M);
  return svd.singularValues()(0);
}

}  // namespace blax
