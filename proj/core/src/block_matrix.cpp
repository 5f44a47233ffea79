#include "supportgraph/block_matrix.hpp"

#include "supportgraph/errors.hpp"

namespace supportgraph {

BlockMatrix BlockMatrix::from_dense(const DenseMatrix& a, std::size_t dim) {
  if (dim == 0 || a.size() % dim != 0)
    throw InputError("dense size is not a multiple of the block size");
  const std::size_t n = a.size() / dim;
  BlockMatrix m(n, dim);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      Block b(dim);
      for (std::size_t r = 0; r < dim; ++r)
        for (std::size_t c = 0; c < dim; ++c) b(r, c) = a(i * dim + r, j * dim + c);
      if (!b.is_zero()) m.set(i, j, b);
    }
  return m;
}

void BlockMatrix::check(std::size_t i, std::size_t j, const Block& b) const {
  if (i >= rows_.size() || j >= rows_.size()) throw InputError("block index out of range");
  if (b.dim() != dim_) throw InputError("block dimension mismatch");
}

void BlockMatrix::set(std::size_t i, std::size_t j, const Block& b) {
  check(i, j, b);
  if (i == j) {
    rows_[i][i] = SymBlock::symmetrize(b).block();
    return;
  }
  rows_[i][j] = b;
  rows_[j][i] = b.transposed();
}

void BlockMatrix::add(std::size_t i, std::size_t j, const Block& b) {
  check(i, j, b);
  if (const Block* cur = find(i, j)) {
    set(i, j, *cur + b);
  } else {
    set(i, j, b);
  }
}

const Block* BlockMatrix::find(std::size_t i, std::size_t j) const {
  const auto it = rows_[i].find(j);
  return it == rows_[i].end() ? nullptr : &it->second;
}

SymBlock BlockMatrix::diagonal(std::size_t i) const {
  const Block* b = find(i, i);
  return b ? SymBlock::symmetrize(*b) : SymBlock(dim_);
}

std::size_t BlockMatrix::stored_blocks() const {
  std::size_t s = 0;
  for (const auto& r : rows_) s += r.size();
  return s;
}

DenseMatrix BlockMatrix::to_dense() const {
  const std::size_t n = rows_.size();
  DenseMatrix a(n * dim_);
  for (std::size_t i = 0; i < n; ++i)
    for (const auto& [j, b] : rows_[i])
      for (std::size_t r = 0; r < dim_; ++r)
        for (std::size_t c = 0; c < dim_; ++c) a(i * dim_ + r, j * dim_ + c) = b(r, c);
  return a;
}

BlockVector BlockMatrix::multiply(const BlockVector& x) const {
  if (x.dim() != dim_ || x.blocks() != rows_.size())
    throw InputError("block matrix multiply: shape mismatch");
  BlockVector y(rows_.size(), dim_);
  for (std::size_t i = 0; i < rows_.size(); ++i)
    for (const auto& [j, b] : rows_[i]) multiply_add(b, x.block(j), y.block(i));
  return y;
}

}  // namespace supportgraph
