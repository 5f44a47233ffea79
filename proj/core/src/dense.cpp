#include "supportgraph/dense.hpp"

#include <algorithm>
#include <cmath>

#include "supportgraph/detail/jacobi.hpp"
#include "supportgraph/errors.hpp"

namespace supportgraph {

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix m(n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

DenseMatrix DenseMatrix::transposed() const {
  DenseMatrix t(n_);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

double DenseMatrix::frobenius_norm() const {
  double s = 0.0;
  for (double x : a_) s += x * x;
  return std::sqrt(s);
}

double DenseMatrix::asymmetry() const {
  double m = 0.0;
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = i + 1; j < n_; ++j)
      m = std::max(m, std::abs((*this)(i, j) - (*this)(j, i)));
  return m;
}

std::vector<double> DenseMatrix::multiply(std::span<const double> x) const {
  if (x.size() != n_) throw InputError("dense multiply: size mismatch");
  std::vector<double> y(n_, 0.0);
  for (std::size_t i = 0; i < n_; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < n_; ++j) s += a_[i * n_ + j] * x[j];
    y[i] = s;
  }
  return y;
}

DenseMatrix& DenseMatrix::operator+=(const DenseMatrix& o) {
  if (o.n_ != n_) throw InputError("dense size mismatch");
  for (std::size_t k = 0; k < a_.size(); ++k) a_[k] += o.a_[k];
  return *this;
}

DenseMatrix& DenseMatrix::operator-=(const DenseMatrix& o) {
  if (o.n_ != n_) throw InputError("dense size mismatch");
  for (std::size_t k = 0; k < a_.size(); ++k) a_[k] -= o.a_[k];
  return *this;
}

DenseMatrix& DenseMatrix::operator*=(double s) {
  for (double& x : a_) x *= s;
  return *this;
}

DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.n_ != b.n_) throw InputError("dense size mismatch");
  const std::size_t n = a.n_;
  DenseMatrix c(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < n; ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

DenseEigen dense_sym_eigen(const DenseMatrix& a) {
  const std::size_t n = a.size();
  std::vector<double> buf(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double x = 0.5 * (a(i, j) + a(j, i));
      if (!std::isfinite(x)) throw InputError("dense_sym_eigen: non-finite entry");
      buf[i * n + j] = x;
    }
  std::vector<double> v;
  detail::jacobi_eigen(buf, n, v);
  DenseEigen out;
  out.values = detail::sort_eigenpairs(buf, n, v);
  out.vectors = DenseMatrix(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) out.vectors(i, j) = v[i * n + j];
  return out;
}

bool is_psd(const DenseMatrix& a, double tol) {
  if (a.size() == 0) return true;
  return dense_sym_eigen(a).values.front() >= -tol * std::max(1.0, a.frobenius_norm());
}

DenseMatrix cholesky_lower(const DenseMatrix& a) {
  const std::size_t n = a.size();
  DenseMatrix r(n);
  for (std::size_t j = 0; j < n; ++j) {
    double diag = a(j, j);
    for (std::size_t k = 0; k < j; ++k) diag -= r(j, k) * r(j, k);
    if (!(diag > 0.0)) throw NotPositiveDefinite(j, "dense Cholesky pivot");
    const double rjj = std::sqrt(diag);
    r(j, j) = rjj;
    for (std::size_t i = j + 1; i < n; ++i) {
      double v = a(i, j);
      for (std::size_t k = 0; k < j; ++k) v -= r(i, k) * r(j, k);
      r(i, j) = v / rjj;
    }
  }
  return r;
}

std::vector<double> solve_spd(const DenseMatrix& a, std::span<const double> b) {
  const std::size_t n = a.size();
  if (b.size() != n) throw InputError("solve_spd: size mismatch");
  const DenseMatrix r = cholesky_lower(a);
  std::vector<double> x(b.begin(), b.end());
  for (std::size_t i = 0; i < n; ++i) {
    double v = x[i];
    for (std::size_t k = 0; k < i; ++k) v -= r(i, k) * x[k];
    x[i] = v / r(i, i);
  }
  for (std::size_t i = n; i-- > 0;) {
    double v = x[i];
    for (std::size_t k = i + 1; k < n; ++k) v -= r(k, i) * x[k];
    x[i] = v / r(i, i);
  }
  return x;
}

}  // namespace supportgraph
