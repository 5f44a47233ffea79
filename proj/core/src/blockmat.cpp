#include "supportgraph/blockmat.hpp"

#include <algorithm>
#include <cmath>

#include "supportgraph/detail/jacobi.hpp"
#include "supportgraph/errors.hpp"

namespace supportgraph {

Block Block::identity(std::size_t dim, double scale) {
  Block b(dim);
  for (std::size_t i = 0; i < dim; ++i) b(i, i) = scale;
  return b;
}

Block Block::transposed() const {
  Block t(dim_);
  for (std::size_t i = 0; i < dim_; ++i)
    for (std::size_t j = 0; j < dim_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

double Block::frobenius_norm() const {
  double s = 0.0;
  for (double x : a_) s += x * x;
  return std::sqrt(s);
}

bool Block::is_zero() const {
  return std::all_of(a_.begin(), a_.end(), [](double x) { return x == 0.0; });
}

Block& Block::operator+=(const Block& o) {
  if (o.dim_ != dim_) throw InputError("block dimension mismatch");
  for (std::size_t k = 0; k < a_.size(); ++k) a_[k] += o.a_[k];
  return *this;
}

Block& Block::operator-=(const Block& o) {
  if (o.dim_ != dim_) throw InputError("block dimension mismatch");
  for (std::size_t k = 0; k < a_.size(); ++k) a_[k] -= o.a_[k];
  return *this;
}

Block& Block::operator*=(double s) {
  for (double& x : a_) x *= s;
  return *this;
}

Block operator*(const Block& a, const Block& b) {
  if (a.dim_ != b.dim_) throw InputError("block dimension mismatch");
  const std::size_t d = a.dim_;
  Block c(d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t k = 0; k < d; ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < d; ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

SymBlock SymBlock::identity(std::size_t dim, double scale) {
  SymBlock s(dim);
  for (std::size_t i = 0; i < dim; ++i) s.set(i, i, scale);
  return s;
}

SymBlock SymBlock::diagonal(std::span<const double> diag) {
  SymBlock s(diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) s.set(i, i, diag[i]);
  return s;
}

SymBlock SymBlock::outer(std::span<const double> u) {
  SymBlock s(u.size());
  for (std::size_t i = 0; i < u.size(); ++i)
    for (std::size_t j = i; j < u.size(); ++j) s.set(i, j, u[i] * u[j]);
  return s;
}

SymBlock SymBlock::symmetrize(const Block& b) {
  SymBlock s(b.dim());
  for (std::size_t i = 0; i < b.dim(); ++i)
    for (std::size_t j = i; j < b.dim(); ++j) s.set(i, j, 0.5 * (b(i, j) + b(j, i)));
  return s;
}

bool SymBlock::all_finite() const {
  const auto d = b_.data();
  return std::all_of(d.begin(), d.end(), [](double x) { return std::isfinite(x); });
}

void multiply_add(const Block& a, std::span<const double> x, std::span<double> y,
                  double alpha) {
  const std::size_t d = a.dim();
  for (std::size_t i = 0; i < d; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < d; ++j) s += a(i, j) * x[j];
    y[i] += alpha * s;
  }
}

void multiply_transpose_add(const Block& a, std::span<const double> x,
                            std::span<double> y, double alpha) {
  const std::size_t d = a.dim();
  for (std::size_t i = 0; i < d; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < d; ++j) s += a(j, i) * x[j];
    y[i] += alpha * s;
  }
}

std::vector<double> multiply(const Block& a, std::span<const double> x) {
  if (x.size() != a.dim()) throw InputError("vector length does not match block");
  std::vector<double> y(a.dim(), 0.0);
  multiply_add(a, x, y);
  return y;
}

SymBlock congruence(const Block& a, const SymBlock& s) {
  return SymBlock::symmetrize(a * s.block() * a.transposed());
}

SmallEigen sym_eigen(const SymBlock& s) {
  if (!s.all_finite()) throw InputError("sym_eigen: non-finite entry");
  const std::size_t d = s.dim();
  std::vector<double> a(s.block().data().begin(), s.block().data().end());
  std::vector<double> v;
  detail::jacobi_eigen(a, d, v);
  SmallEigen out;
  out.values = detail::sort_eigenpairs(a, d, v);
  out.vectors = Block(d);
  std::copy(v.begin(), v.end(), out.vectors.data().begin());
  return out;
}

double lambda_min(const SymBlock& s) { return sym_eigen(s).values.front(); }

double lambda_max(const SymBlock& s) { return sym_eigen(s).values.back(); }

double condition_number(const SymBlock& s) {
  const auto e = sym_eigen(s);
  return e.values.back() / e.values.front();
}

bool is_psd(const SymBlock& s, double tol) {
  return lambda_min(s) >= -tol * std::max(1.0, s.frobenius_norm());
}

BlockCholesky::BlockCholesky(const SymBlock& s) : l_(s.dim()) {
  if (!s.all_finite()) throw SingularBlock("non-finite entry in block");
  const std::size_t d = s.dim();
  const double scale = std::max(s.frobenius_norm(), 1e-300);
  for (std::size_t j = 0; j < d; ++j) {
    double diag = s(j, j);
    for (std::size_t k = 0; k < j; ++k) diag -= l_(j, k) * l_(j, k);
    if (!(diag > 1e-15 * scale))
      throw SingularBlock("block is singular or indefinite (pivot " +
                          std::to_string(j) + ")");
    const double ljj = std::sqrt(diag);
    l_(j, j) = ljj;
    for (std::size_t i = j + 1; i < d; ++i) {
      double v = s(i, j);
      for (std::size_t k = 0; k < j; ++k) v -= l_(i, k) * l_(j, k);
      l_(i, j) = v / ljj;
    }
  }
}

void BlockCholesky::solve_in_place(std::span<double> x) const {
  const std::size_t d = l_.dim();
  for (std::size_t i = 0; i < d; ++i) {
    double v = x[i];
    for (std::size_t k = 0; k < i; ++k) v -= l_(i, k) * x[k];
    x[i] = v / l_(i, i);
  }
  for (std::size_t i = d; i-- > 0;) {
    double v = x[i];
    for (std::size_t k = i + 1; k < d; ++k) v -= l_(k, i) * x[k];
    x[i] = v / l_(i, i);
  }
}

std::vector<double> BlockCholesky::solve(std::span<const double> b) const {
  if (b.size() != dim()) throw InputError("vector length does not match block");
  std::vector<double> x(b.begin(), b.end());
  solve_in_place(x);
  return x;
}

Block BlockCholesky::solve(const Block& b) const {
  const std::size_t d = dim();
  Block x(d);
  std::vector<double> col(d);
  for (std::size_t j = 0; j < d; ++j) {
    for (std::size_t i = 0; i < d; ++i) col[i] = b(i, j);
    solve_in_place(col);
    for (std::size_t i = 0; i < d; ++i) x(i, j) = col[i];
  }
  return x;
}

SymBlock BlockCholesky::inverse() const {
  return SymBlock::symmetrize(solve(Block::identity(dim())));
}

std::vector<double> solve_block(const SymBlock& s, std::span<const double> b) {
  return BlockCholesky(s).solve(b);
}

}  // namespace supportgraph
