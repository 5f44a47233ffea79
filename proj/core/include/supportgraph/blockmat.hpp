#pragma once

// Dense kernels for the small d x d blocks that make up a block Laplacian.

#include <cstddef>
#include <span>
#include <vector>

namespace supportgraph {

inline constexpr std::size_t kDefaultBlockDim = 3;

/// General dense d x d matrix, row-major. L factors and products of
/// symmetric blocks are not symmetric, so they live here.
class Block {
 public:
  Block() = default;
  explicit Block(std::size_t dim) : dim_(dim), a_(dim * dim, 0.0) {}

  static Block identity(std::size_t dim, double scale = 1.0);

  std::size_t dim() const noexcept { return dim_; }
  double operator()(std::size_t i, std::size_t j) const { return a_[i * dim_ + j]; }
  double& operator()(std::size_t i, std::size_t j) { return a_[i * dim_ + j]; }
  std::span<const double> data() const noexcept { return a_; }
  std::span<double> data() noexcept { return a_; }

  Block transposed() const;
  double frobenius_norm() const;
  bool is_zero() const;

  Block& operator+=(const Block& o);
  Block& operator-=(const Block& o);
  Block& operator*=(double s);

  friend Block operator+(Block a, const Block& b) { return a += b; }
  friend Block operator-(Block a, const Block& b) { return a -= b; }
  friend Block operator*(Block a, double s) { return a *= s; }
  friend Block operator*(double s, Block a) { return a *= s; }
  friend Block operator*(const Block& a, const Block& b);
  friend bool operator==(const Block&, const Block&) = default;

 private:
  std::size_t dim_ = 0;
  std::vector<double> a_;
};

/// Symmetric d x d block. Storage enforces symmetry: every write goes to
/// both (i, j) and (j, i).
class SymBlock {
 public:
  SymBlock() = default;
  explicit SymBlock(std::size_t dim) : b_(dim) {}

  static SymBlock identity(std::size_t dim, double scale = 1.0);
  static SymBlock diagonal(std::span<const double> diag);
  /// u u^T
  static SymBlock outer(std::span<const double> u);
  /// (B + B^T) / 2
  static SymBlock symmetrize(const Block& b);

  std::size_t dim() const noexcept { return b_.dim(); }
  double operator()(std::size_t i, std::size_t j) const { return b_(i, j); }
  void set(std::size_t i, std::size_t j, double v) {
    b_(i, j) = v;
    b_(j, i) = v;
  }
  const Block& block() const noexcept { return b_; }
  operator const Block&() const noexcept { return b_; }  // NOLINT

  double frobenius_norm() const { return b_.frobenius_norm(); }
  bool is_zero() const { return b_.is_zero(); }
  bool all_finite() const;

  SymBlock& operator+=(const SymBlock& o) {
    b_ += o.b_;
    return *this;
  }
  SymBlock& operator-=(const SymBlock& o) {
    b_ -= o.b_;
    return *this;
  }
  SymBlock& operator*=(double s) {
    b_ *= s;
    return *this;
  }
  friend SymBlock operator+(SymBlock a, const SymBlock& b) { return a += b; }
  friend SymBlock operator-(SymBlock a, const SymBlock& b) { return a -= b; }
  friend SymBlock operator-(SymBlock a) { return a *= -1.0; }
  friend SymBlock operator*(SymBlock a, double s) { return a *= s; }
  friend SymBlock operator*(double s, SymBlock a) { return a *= s; }
  friend bool operator==(const SymBlock&, const SymBlock&) = default;

 private:
  Block b_;
};

/// y += alpha * A x
void multiply_add(const Block& a, std::span<const double> x, std::span<double> y,
                  double alpha = 1.0);
/// y += alpha * A^T x
void multiply_transpose_add(const Block& a, std::span<const double> x,
                            std::span<double> y, double alpha = 1.0);
std::vector<double> multiply(const Block& a, std::span<const double> x);

/// A S A^T, symmetrized to absorb rounding.
SymBlock congruence(const Block& a, const SymBlock& s);

struct SmallEigen {
  std::vector<double> values;  // ascending
  Block vectors;               // column k is the eigenvector of values[k]
};

/// Cyclic Jacobi eigen-decomposition. Throws InputError on non-finite input.
SmallEigen sym_eigen(const SymBlock& s);

double lambda_min(const SymBlock& s);
double lambda_max(const SymBlock& s);
double condition_number(const SymBlock& s);

/// True iff lambda_min(S) >= -tol * max(1, ||S||_F).
bool is_psd(const SymBlock& s, double tol);

/// Cholesky factor of an SPD block, reusable for many right-hand sides.
class BlockCholesky {
 public:
  BlockCholesky() = default;
  /// Throws SingularBlock if a pivot is not strictly positive.
  explicit BlockCholesky(const SymBlock& s);

  std::size_t dim() const noexcept { return l_.dim(); }
  void solve_in_place(std::span<double> x) const;
  std::vector<double> solve(std::span<const double> b) const;
  /// Returns X with S X = B.
  Block solve(const Block& b) const;
  SymBlock inverse() const;

 private:
  Block l_;
};

/// Solves S x = b for SPD S. Throws SingularBlock for singular or indefinite S.
std::vector<double> solve_block(const SymBlock& s, std::span<const double> b);

}  // namespace supportgraph
