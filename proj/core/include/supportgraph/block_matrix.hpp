#pragma once

#include <cstddef>
#include <map>
#include <vector>

#include "supportgraph/block_vector.hpp"
#include "supportgraph/blockmat.hpp"
#include "supportgraph/dense.hpp"

namespace supportgraph {

/// Sparse symmetric block matrix. Both triangles are stored so rows can be
/// walked without transposing; writes keep (i, j) and (j, i) consistent.
class BlockMatrix {
 public:
  using Row = std::map<std::size_t, Block>;

  BlockMatrix() = default;
  BlockMatrix(std::size_t n, std::size_t dim) : dim_(dim), rows_(n) {}

  static BlockMatrix from_dense(const DenseMatrix& a, std::size_t dim);

  std::size_t blocks() const noexcept { return rows_.size(); }
  std::size_t dim() const noexcept { return dim_; }

  /// Sets block (i, j) and its transpose partner. Diagonal blocks are
  /// symmetrized.
  void set(std::size_t i, std::size_t j, const Block& b);
  void add(std::size_t i, std::size_t j, const Block& b);

  /// nullptr when the block is structurally zero.
  const Block* find(std::size_t i, std::size_t j) const;
  SymBlock diagonal(std::size_t i) const;
  const Row& row(std::size_t i) const { return rows_[i]; }
  std::size_t stored_blocks() const;

  DenseMatrix to_dense() const;
  BlockVector multiply(const BlockVector& x) const;

 private:
  void check(std::size_t i, std::size_t j, const Block& b) const;

  std::size_t dim_ = 0;
  std::vector<Row> rows_;
};

}  // namespace supportgraph
