#pragma once

#include <complex>
#include <vector>

namespace pslab {

using cdouble = std::complex<double>;

// Dense row-major complex matrix. Small sizes only; everything here is meant
// for Gram systems and compressed operators with a few dozen rows.
class CMatrix {
 public:
  CMatrix() = default;
  CMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), a_(rows * cols, cdouble(0.0, 0.0)) {}

  static CMatrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  cdouble& at(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
  const cdouble& at(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

  CMatrix adjoint() const;
  CMatrix operator*(const CMatrix& rhs) const;
  CMatrix operator+(const CMatrix& rhs) const;
  CMatrix operator-(const CMatrix& rhs) const;
  CMatrix scaled(cdouble s) const;

  std::vector<cdouble> apply(const std::vector<cdouble>& x) const;
  double frobenius_norm() const;
  double max_abs() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<cdouble> a_;
};

struct HermitianEigen {
  std::vector<double> values;  // ascending
  CMatrix vectors;             // columns are eigenvectors, unitary
};

// Cyclic Jacobi for Hermitian matrices. Throws InvalidArgument if the input
// is not square or not Hermitian within a loose tolerance.
HermitianEigen hermitian_eigen(const CMatrix& a);

// Solve G x = rhs for Hermitian positive semidefinite G through its
// eigendecomposition. Directions with eigenvalue below rcond_min * lambda_max
// are treated as null; if rhs has a significant component there, or the
// matrix is uniformly tiny, SingularGram is thrown.
std::vector<cdouble> solve_hermitian_psd(const CMatrix& gram,
                                         const std::vector<cdouble>& rhs,
                                         double rcond_min = 1e-10);

// Largest singular value.
double operator_norm(const CMatrix& m);

// In-place modified Gram-Schmidt on the columns, two passes. Throws
// SingularGram when a column's residual norm falls below `tol`.
void orthonormalize_columns(CMatrix& m, double tol = 1e-12);

// Deterministic Haar-ish random unitary built from seeded entries + MGS.
CMatrix random_unitary(std::size_t n, std::uint64_t seed);

// Rank of a real matrix given as rows, by Gaussian elimination with partial
// pivoting. Used for cone pointedness checks on facet normal matrices.
std::size_t real_rank(const std::vector<std::vector<double>>& rows, double tol = 1e-10);

// Least squares solution of A x = b via normal equations (A real, full
// column rank assumed; returns empty vector when the normal matrix is
// numerically singular).
std::vector<double> least_squares(const std::vector<std::vector<double>>& a,
                                  const std::vector<double>& b);

}  // namespace pslab
