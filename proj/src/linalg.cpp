#include "netprox/linalg.hpp"

#include <stdexcept>

namespace netprox {

SymEig sym_eig(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(0.5 * (m + m.transpose()));
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("symmetric eigendecomposition failed");
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

Matrix sym_sqrt(const Matrix& m, double clip) {
  SymEig eig = sym_eig(m);
  Vector roots = eig.values.unaryExpr(
      [clip](double v) { return v > clip ? std::sqrt(v) : 0.0; });
  return eig.vectors * roots.asDiagonal() * eig.vectors.transpose();
}

Matrix sym_pinv_sqrt(const Matrix& m, double clip) {
  SymEig eig = sym_eig(m);
  Vector inv = eig.values.unaryExpr(
      [clip](double v) { return v > clip ? 1.0 / std::sqrt(v) : 0.0; });
  return eig.vectors * inv.asDiagonal() * eig.vectors.transpose();
}

double max_eig_b2_ic_inv(const Matrix& b, const Matrix& c) {
  const Matrix ic = Matrix::Identity(c.rows(), c.cols()) - c;
  SymEig eig = sym_eig(ic);
  if (eig.values.minCoeff() <= 0.0) {
    throw std::invalid_argument("I - C is not positive definite");
  }
  Vector inv_roots = eig.values.cwiseSqrt().cwiseInverse();
  const Matrix ic_inv_sqrt =
      eig.vectors * inv_roots.asDiagonal() * eig.vectors.transpose();
  const Matrix half = b * ic_inv_sqrt;  // B (I-C)^{-1/2}
  return sym_eig(half.transpose() * half).values.maxCoeff();
}

bool is_symmetric(const Matrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  return (m - m.transpose()).cwiseAbs().maxCoeff() <=
         tol * (1.0 + m.cwiseAbs().maxCoeff());
}

Matrix averaging_projector(int m) {
  return Matrix::Constant(m, m, 1.0 / static_cast<double>(m));
}

Matrix row_mean_replicated(const Matrix& x) {
  Eigen::RowVectorXd mean = x.colwise().mean();
  return mean.replicate(x.rows(), 1);
}

}  // namespace netprox
