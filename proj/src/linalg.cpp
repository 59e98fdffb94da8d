#include "pslab/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "pslab/errors.hpp"
#include "pslab/rng.hpp"

namespace pslab {

CMatrix CMatrix::identity(std::size_t n) {
  CMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1.0;
  return m;
}

CMatrix CMatrix::adjoint() const {
  CMatrix r(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) r.at(j, i) = std::conj(at(i, j));
  return r;
}

CMatrix CMatrix::operator*(const CMatrix& rhs) const {
  if (cols_ != rhs.rows_) throw InvalidArgument("CMatrix multiply: shape mismatch");
  CMatrix r(rows_, rhs.cols_);
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t k = 0; k < cols_; ++k) {
      const cdouble aik = at(i, k);
      if (aik == cdouble(0.0, 0.0)) continue;
      for (std::size_t j = 0; j < rhs.cols_; ++j) r.at(i, j) += aik * rhs.at(k, j);
    }
  }
  return r;
}

CMatrix CMatrix::operator+(const CMatrix& rhs) const {
  if (rows_ != rhs.rows_ || cols_ != rhs.cols_)
    throw InvalidArgument("CMatrix add: shape mismatch");
  CMatrix r(rows_, cols_);
  for (std::size_t i = 0; i < a_.size(); ++i) r.a_[i] = a_[i] + rhs.a_[i];
  return r;
}

CMatrix CMatrix::operator-(const CMatrix& rhs) const {
  if (rows_ != rhs.rows_ || cols_ != rhs.cols_)
    throw InvalidArgument("CMatrix subtract: shape mismatch");
  CMatrix r(rows_, cols_);
  for (std::size_t i = 0; i < a_.size(); ++i) r.a_[i] = a_[i] - rhs.a_[i];
  return r;
}

CMatrix CMatrix::scaled(cdouble s) const {
  CMatrix r(rows_, cols_);
  for (std::size_t i = 0; i < a_.size(); ++i) r.a_[i] = a_[i] * s;
  return r;
}

std::vector<cdouble> CMatrix::apply(const std::vector<cdouble>& x) const {
  if (x.size() != cols_) throw InvalidArgument("CMatrix apply: size mismatch");
  std::vector<cdouble> y(rows_, cdouble(0.0, 0.0));
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) y[i] += at(i, j) * x[j];
  return y;
}

double CMatrix::frobenius_norm() const {
  double s = 0.0;
  for (const auto& z : a_) s += std::norm(z);
  return std::sqrt(s);
}

double CMatrix::max_abs() const {
  double s = 0.0;
  for (const auto& z : a_) s = std::max(s, std::abs(z));
  return s;
}

namespace {

double offdiag_norm(const CMatrix& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (i != j) s += std::norm(a.at(i, j));
  return std::sqrt(s);
}

}  // namespace

HermitianEigen hermitian_eigen(const CMatrix& input) {
  const std::size_t n = input.rows();
  if (n != input.cols()) throw InvalidArgument("hermitian_eigen: matrix not square");
  double scale = input.max_abs();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (std::abs(input.at(i, j) - std::conj(input.at(j, i))) > 1e-8 * std::max(1.0, scale))
        throw InvalidArgument("hermitian_eigen: matrix not Hermitian");

  CMatrix a = input;
  // Symmetrize exactly so rounding asymmetry cannot accumulate.
  for (std::size_t i = 0; i < n; ++i) {
    a.at(i, i) = cdouble(a.at(i, i).real(), 0.0);
    for (std::size_t j = i + 1; j < n; ++j) {
      cdouble m = 0.5 * (a.at(i, j) + std::conj(a.at(j, i)));
      a.at(i, j) = m;
      a.at(j, i) = std::conj(m);
    }
  }
  CMatrix v = CMatrix::identity(n);

  const double stop = 1e-15 * std::max(1.0, scale) * static_cast<double>(n);
  for (int sweep = 0; sweep < 100 && offdiag_norm(a) > stop; ++sweep) {
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const cdouble g = a.at(p, q);
        const double ag = std::abs(g);
        if (ag <= 1e-300) continue;
        const double app = a.at(p, p).real();
        const double aqq = a.at(q, q).real();
        const double tau = (aqq - app) / (2.0 * ag);
        double t;
        if (tau >= 0.0)
          t = 1.0 / (tau + std::sqrt(1.0 + tau * tau));
        else
          t = -1.0 / (-tau + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        const cdouble u = g / ag;  // unit phase
        const cdouble spu = s * u;
        // Right-multiply a and v by the rotation, left-multiply a by its adjoint.
        for (std::size_t k = 0; k < n; ++k) {
          const cdouble akp = a.at(k, p);
          const cdouble akq = a.at(k, q);
          a.at(k, p) = c * akp - std::conj(spu) * akq;
          a.at(k, q) = spu * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const cdouble apk = a.at(p, k);
          const cdouble aqk = a.at(q, k);
          a.at(p, k) = c * apk - spu * aqk;
          a.at(q, k) = std::conj(spu) * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const cdouble vkp = v.at(k, p);
          const cdouble vkq = v.at(k, q);
          v.at(k, p) = c * vkp - std::conj(spu) * vkq;
          v.at(k, q) = spu * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i) d[i] = a.at(i, i).real();
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return d[x] < d[y]; });

  HermitianEigen out;
  out.values.resize(n);
  out.vectors = CMatrix(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    out.values[j] = d[order[j]];
    for (std::size_t i = 0; i < n; ++i) out.vectors.at(i, j) = v.at(i, order[j]);
  }
  return out;
}

std::vector<cdouble> solve_hermitian_psd(const CMatrix& gram,
                                         const std::vector<cdouble>& rhs,
                                         double rcond_min) {
  const std::size_t n = gram.rows();
  if (rhs.size() != n) throw InvalidArgument("solve_hermitian_psd: rhs size mismatch");
  const HermitianEigen eig = hermitian_eigen(gram);
  const double lmax = eig.values.empty() ? 0.0 : eig.values.back();
  if (lmax <= 0.0) throw SingularGram("Gram matrix is numerically zero");
  const double cutoff = rcond_min * lmax;
  if (eig.values.front() < cutoff) {
    // Allow exact rank deficiency only when rhs has no component there.
    double rhs_norm = 0.0;
    for (const auto& z : rhs) rhs_norm += std::norm(z);
    rhs_norm = std::sqrt(rhs_norm);
    for (std::size_t j = 0; j < n; ++j) {
      if (eig.values[j] >= cutoff) break;
      cdouble comp = 0.0;
      for (std::size_t i = 0; i < n; ++i) comp += std::conj(eig.vectors.at(i, j)) * rhs[i];
      if (std::abs(comp) > 1e-8 * std::max(1.0, rhs_norm))
        throw SingularGram("Gram system singular beyond conditioning threshold");
    }
  }
  std::vector<cdouble> x(n, cdouble(0.0, 0.0));
  for (std::size_t j = 0; j < n; ++j) {
    if (eig.values[j] < cutoff) continue;
    cdouble comp = 0.0;
    for (std::size_t i = 0; i < n; ++i) comp += std::conj(eig.vectors.at(i, j)) * rhs[i];
    comp /= eig.values[j];
    for (std::size_t i = 0; i < n; ++i) x[i] += comp * eig.vectors.at(i, j);
  }
  return x;
}

double operator_norm(const CMatrix& m) {
  if (m.rows() == 0 || m.cols() == 0) return 0.0;
  const CMatrix g = m.adjoint() * m;
  const HermitianEigen eig = hermitian_eigen(g);
  return std::sqrt(std::max(0.0, eig.values.back()));
}

void orthonormalize_columns(CMatrix& m, double tol) {
  const std::size_t n = m.rows();
  const std::size_t k = m.cols();
  for (std::size_t j = 0; j < k; ++j) {
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t i = 0; i < j; ++i) {
        cdouble proj = 0.0;
        for (std::size_t r = 0; r < n; ++r) proj += std::conj(m.at(r, i)) * m.at(r, j);
        for (std::size_t r = 0; r < n; ++r) m.at(r, j) -= proj * m.at(r, i);
      }
    }
    double nrm = 0.0;
    for (std::size_t r = 0; r < n; ++r) nrm += std::norm(m.at(r, j));
    nrm = std::sqrt(nrm);
    if (nrm < tol) throw SingularGram("orthonormalize_columns: rank deficient");
    for (std::size_t r = 0; r < n; ++r) m.at(r, j) /= nrm;
  }
}

CMatrix random_unitary(std::size_t n, std::uint64_t seed) {
  CounterRng rng(seed, 77);
  CMatrix m(n, n);
  std::uint64_t c = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double re = rng.uniform_at(c++, -1.0, 1.0);
      const double im = rng.uniform_at(c++, -1.0, 1.0);
      m.at(i, j) = cdouble(re, im);
    }
  orthonormalize_columns(m);
  return m;
}

std::size_t real_rank(const std::vector<std::vector<double>>& rows, double tol) {
  std::vector<std::vector<double>> a = rows;
  const std::size_t m = a.size();
  if (m == 0) return 0;
  const std::size_t n = a[0].size();
  std::size_t rank = 0;
  for (std::size_t col = 0; col < n && rank < m; ++col) {
    std::size_t piv = rank;
    for (std::size_t r = rank + 1; r < m; ++r)
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    if (std::abs(a[piv][col]) <= tol) continue;
    std::swap(a[piv], a[rank]);
    for (std::size_t r = 0; r < m; ++r) {
      if (r == rank) continue;
      const double f = a[r][col] / a[rank][col];
      for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[rank][c];
    }
    ++rank;
  }
  return rank;
}

std::vector<double> least_squares(const std::vector<std::vector<double>>& a,
                                  const std::vector<double>& b) {
  const std::size_t m = a.size();
  if (m == 0 || b.size() != m) return {};
  const std::size_t n = a[0].size();
  // Normal equations: (A^T A) x = A^T b.
  std::vector<std::vector<double>> ata(n, std::vector<double>(n + 1, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t r = 0; r < m; ++r) ata[i][j] += a[r][i] * a[r][j];
    for (std::size_t r = 0; r < m; ++r) ata[i][n] += a[r][i] * b[r];
  }
  // Gaussian elimination with partial pivoting on the augmented system.
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(ata[r][col]) > std::abs(ata[piv][col])) piv = r;
    if (std::abs(ata[piv][col]) < 1e-12) return {};
    std::swap(ata[piv], ata[col]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      const double f = ata[r][col] / ata[col][col];
      for (std::size_t c = col; c <= n; ++c) ata[r][c] -= f * ata[col][c];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = ata[i][n] / ata[i][i];
  return x;
}

}  // namespace pslab
