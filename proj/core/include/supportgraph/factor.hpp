#pragma once

// Block LDL^T factorization: the general left-looking algorithm, the linear
// time tree specialization, and the three-phase solve.

#include <cstddef>
#include <utility>
#include <vector>

#include "supportgraph/block_matrix.hpp"
#include "supportgraph/block_vector.hpp"
#include "supportgraph/blockmat.hpp"
#include "supportgraph/dense.hpp"
#include "supportgraph/graph.hpp"

namespace supportgraph {

/// A pivot whose lambda_min is at or below this fraction of its Frobenius
/// norm is rejected.
inline constexpr double kPivotTolerance = 1e-14;

/// Block operation tally for one solve.
struct BlockOpCounter {
  std::size_t offdiagonal_applications = 0;  // L or L^T block times vector
  std::size_t diagonal_solves = 0;           // D_ii^{-1} applications

  std::size_t total() const noexcept { return offdiagonal_applications + diagonal_solves; }
};

/// P A P^T = L D L^T with unit block-lower-triangular L. Everything is
/// stored in elimination positions; order()[p] is the vertex at position p.
class BlockLDLT {
 public:
  struct Entry {
    std::size_t col;  // position, < row
    Block value;
  };

  BlockLDLT() = default;

  std::size_t blocks() const noexcept { return order_.size(); }
  std::size_t dim() const noexcept { return dim_; }
  const std::vector<std::size_t>& order() const noexcept { return order_; }
  std::size_t position(std::size_t vertex) const { return position_[vertex]; }

  const SymBlock& d(std::size_t pos) const { return d_[pos]; }
  /// Strictly lower entries of row `pos`, sorted by column.
  const std::vector<Entry>& row(std::size_t pos) const { return rows_[pos]; }
  /// L block at (row, col) positions: identity on the diagonal, zero when
  /// not stored.
  Block l(std::size_t row, std::size_t col) const;
  std::size_t offdiagonal_count() const;

  /// Off-diagonal entries of L as (later vertex, earlier vertex) pairs.
  std::vector<std::pair<std::size_t, std::size_t>> lower_pattern() const;

  /// Solves (L D L^T) x = b in vertex numbering via forward substitution,
  /// block-diagonal solve and backward substitution.
  BlockVector solve(const BlockVector& b, BlockOpCounter* counter = nullptr) const;

  /// L D L^T mapped back to vertex numbering.
  DenseMatrix reconstruct() const;

 private:
  friend BlockLDLT ldlt_general(const BlockMatrix&, const std::vector<std::size_t>&);
  friend BlockLDLT ldlt_tree(const RootedTree&);

  void init(std::size_t dim, std::vector<std::size_t> order);
  /// Stores the pivot; throws NotPositiveDefinite(vertex) when it is not SPD.
  void set_pivot(std::size_t pos, SymBlock pivot);

  std::size_t dim_ = 0;
  std::vector<std::size_t> order_;
  std::vector<std::size_t> position_;
  std::vector<SymBlock> d_;
  std::vector<BlockCholesky> d_factor_;
  std::vector<std::vector<Entry>> rows_;
};

/// Left-looking block LDL^T of a symmetric positive definite block matrix
/// under `order`. The sparsity of L (original plus fill) comes from the
/// elimination game; structurally zero blocks are skipped, everything else
/// follows the dense algorithm.
BlockLDLT ldlt_general(const BlockMatrix& a, const std::vector<std::size_t>& order);

/// Linear-time factorization of a tree Laplacian in the tree's elimination
/// order (children before parents). L has exactly the tree's pattern.
BlockLDLT ldlt_tree(const RootedTree& t);

/// Three-phase solve; for a tree factorization it costs n - 1 block
/// products per substitution and n diagonal solves.
BlockVector tree_solve(const BlockLDLT& f, const BlockVector& b,
                       BlockOpCounter* counter = nullptr);

}  // namespace supportgraph
