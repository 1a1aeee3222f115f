#pragma once

#include <complex>
#include <vector>

#include "ifsm/matrix.hpp"

// Dense decompositions sized for the problems this library learns on
// (K <= 10 outputs, N <= a few hundred inputs). Everything is deterministic:
// identical input produces bit-identical output.
namespace ifsm::linalg {

struct SymEig {
  std::vector<double> values;  ///< descending
  Matrix vectors;              ///< column i pairs with values[i]
};

/// Cyclic Jacobi eigendecomposition of a symmetric matrix.
///
/// Throws NotSymmetric if ‖a − aᵀ‖ > tol·‖a‖ and NoConvergence if the sweep
/// cap (100) is reached. Eigenvalues are sorted descending; eigenvectors are
/// orthonormal columns.
SymEig sym_eig(const Matrix& a, double tol = 1e-12);

struct Svd {
  Matrix u;               ///< m×r, orthonormal columns
  std::vector<double> s;  ///< r = min(m, n) values, descending, nonnegative
  Matrix v;               ///< n×r, orthonormal columns
};

inline constexpr std::size_t kSvdMaxDim = 64;

/// Thin SVD of a small matrix (at most 64 rows and columns) through the
/// eigendecomposition of its Gram matrix. Columns of u belonging to zero
/// singular values are completed to an orthonormal set.
Svd svd_small(const Matrix& a);

/// Sum of singular values.
double nuclear_norm(const Matrix& a);

struct Qr {
  Matrix q;  ///< m×n, orthonormal columns
  Matrix r;  ///< n×n, upper triangular with nonnegative diagonal
};

/// Householder QR of a matrix with rows >= cols. The diagonal of r is made
/// nonnegative, which fixes the decomposition uniquely for full-rank input.
/// Throws RankDeficient if any |r_ii| < 1e-14·‖a‖.
Qr qr(const Matrix& a);

/// Solves m·x = b for symmetric m by Gaussian elimination with partial
/// pivoting. Throws NotSymmetric for asymmetric input and SingularMatrix if a
/// pivot falls below 1e-14·‖m‖.
Vector solve_symmetric(const Matrix& m, const Vector& b);
/// Multiple right-hand sides: solves m·X = b column by column.
Matrix solve_symmetric(const Matrix& m, const Matrix& b);

/// Eigenvalues of a general real square matrix (Householder reduction to
/// Hessenberg form followed by Francis double-shift QR). Order unspecified.
std::vector<std::complex<double>> eigenvalues(const Matrix& a);

}  // namespace ifsm::linalg
