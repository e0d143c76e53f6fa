#pragma once

#include <Eigen/Dense>

namespace netprox {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct SymEig {
  Vector values;   // ascending
  Matrix vectors;  // columns, orthonormal
};

// Symmetric eigendecomposition; input is symmetrized as (M + M^T)/2 first.
SymEig sym_eig(const Matrix& m);

// PSD square root; eigenvalues below `clip` are treated as zero.
Matrix sym_sqrt(const Matrix& m, double clip = 1e-12);

// Moore-Penrose pseudoinverse of the PSD square root of `m`.
Matrix sym_pinv_sqrt(const Matrix& m, double clip = 1e-12);

// Largest eigenvalue of B^2 (I-C)^{-1}, evaluated through the symmetric
// congruence (I-C)^{-1/2} B^2 (I-C)^{-1/2}. Requires I-C positive definite.
double max_eig_b2_ic_inv(const Matrix& b, const Matrix& c);

// Snap a scalar to `bound` when within `tol` of it.
inline double snap(double x, double bound, double tol = 1e-12) {
  return (std::abs(x - bound) <= tol) ? bound : x;
}

bool is_symmetric(const Matrix& m, double tol = 1e-9);

// J = 1 1^T / m, the columnwise averaging projector.
Matrix averaging_projector(int m);

// Replicated column means: every row of the result equals the mean row of x.
Matrix row_mean_replicated(const Matrix& x);

}  // namespace netprox
