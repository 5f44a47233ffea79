#pragma once

// Square dense matrices for desk-scale oracles and spectral checks.

#include <cstddef>
#include <span>
#include <vector>

namespace supportgraph {

class DenseMatrix {
 public:
  DenseMatrix() = default;
  explicit DenseMatrix(std::size_t n) : n_(n), a_(n * n, 0.0) {}

  static DenseMatrix identity(std::size_t n);

  std::size_t size() const noexcept { return n_; }
  double operator()(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }
  double& operator()(std::size_t i, std::size_t j) { return a_[i * n_ + j]; }
  std::span<const double> data() const noexcept { return a_; }

  DenseMatrix transposed() const;
  double frobenius_norm() const;
  /// max |A - A^T| entry
  double asymmetry() const;

  std::vector<double> multiply(std::span<const double> x) const;

  DenseMatrix& operator+=(const DenseMatrix& o);
  DenseMatrix& operator-=(const DenseMatrix& o);
  DenseMatrix& operator*=(double s);
  friend DenseMatrix operator+(DenseMatrix a, const DenseMatrix& b) { return a += b; }
  friend DenseMatrix operator-(DenseMatrix a, const DenseMatrix& b) { return a -= b; }
  friend DenseMatrix operator*(double s, DenseMatrix a) { return a *= s; }
  friend DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b);

 private:
  std::size_t n_ = 0;
  std::vector<double> a_;
};

struct DenseEigen {
  std::vector<double> values;  // ascending
  DenseMatrix vectors;         // columns
};

/// Cyclic Jacobi on the symmetric part of `a`.
DenseEigen dense_sym_eigen(const DenseMatrix& a);

/// True iff lambda_min(A) >= -tol * max(1, ||A||_F).
bool is_psd(const DenseMatrix& a, double tol);

/// Lower Cholesky factor R with A = R R^T. Throws NotPositiveDefinite(row).
DenseMatrix cholesky_lower(const DenseMatrix& a);

/// Solves A x = b for SPD A.
std::vector<double> solve_spd(const DenseMatrix& a, std::span<const double> b);

}  // namespace supportgraph
