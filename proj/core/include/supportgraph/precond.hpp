#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "supportgraph/block_matrix.hpp"
#include "supportgraph/block_vector.hpp"
#include "supportgraph/blockmat.hpp"
#include "supportgraph/factor.hpp"
#include "supportgraph/graph.hpp"

namespace supportgraph {

enum class StrategyKind { Identity, Jacobi, BlockJacobi, Mst, RowMst, AugmentedMst };

/// A preconditioning strategy. CLI tokens: identity, jacobi, block-jacobi,
/// mst, row-mst, aug-mst[:t].
struct Strategy {
  StrategyKind kind = StrategyKind::Identity;
  /// Subtree count for AugmentedMst; unset means round(n^(1/4)).
  std::optional<std::size_t> subtrees;

  static Strategy parse(std::string_view token);
  std::string token() const;
  /// Whether the preconditioner is the Laplacian of a subgraph, so that
  /// lambda_min(Gamma, P) >= 1.
  bool is_subgraph() const noexcept {
    return kind == StrategyKind::Mst || kind == StrategyKind::AugmentedMst;
  }
  friend bool operator==(const Strategy&, const Strategy&) = default;
};

/// Parses a comma-separated strategy list.
std::vector<Strategy> parse_strategy_list(std::string_view list);

std::size_t default_subtree_count(std::size_t n);

/// Immutable M^{-1} action built from a collision graph.
class Preconditioner {
 public:
  /// Tree-based strategies on a disconnected graph are built per connected
  /// component and applied block-diagonally. Throws NotPositiveDefinite from
  /// the underlying builders.
  static Preconditioner build(const Strategy& strategy, const MatrixWeightedGraph& g);

  const Strategy& strategy() const noexcept { return strategy_; }
  std::size_t blocks() const noexcept { return n_; }
  std::size_t dim() const noexcept { return dim_; }

  BlockVector apply(const BlockVector& r) const;

  /// The preconditioner matrix P itself (not its inverse).
  BlockMatrix matrix() const;

  /// Support graph whose block Laplacian is P, for the tree-based strategies.
  const MatrixWeightedGraph* support_graph() const;
  /// Null for non-tree strategies and for per-component builds.
  const BlockLDLT* factorization() const;
  /// Number of connected components built separately (1 when connected).
  std::size_t components() const noexcept;

  /// Subtrees used (AugmentedMst only).
  std::size_t subtrees_used() const noexcept { return subtrees_used_; }
  std::size_t extra_edges() const noexcept { return extra_edges_; }
  /// Off-diagonal L blocks beyond the support graph's edges.
  std::size_t fill_blocks() const noexcept { return fill_blocks_; }

 private:
  struct Scalar {
    std::vector<double> inverse_diagonal;
  };
  struct Blocked {
    std::vector<SymBlock> diagonal;
    std::vector<BlockCholesky> factors;
  };
  struct Factored {
    MatrixWeightedGraph graph;
    BlockLDLT factor;
  };
  struct Split {
    std::vector<std::vector<std::size_t>> components;
    std::vector<Preconditioner> parts;
    MatrixWeightedGraph graph;  // union of the parts' support graphs
  };

  static Preconditioner build_connected(const Strategy& strategy, const MatrixWeightedGraph& g);

  Strategy strategy_;
  std::size_t n_ = 0;
  std::size_t dim_ = 0;
  std::size_t subtrees_used_ = 0;
  std::size_t extra_edges_ = 0;
  std::size_t fill_blocks_ = 0;
  std::variant<std::monostate, Scalar, Blocked, Factored, Split> payload_;
};

/// Elimination order for an augmented tree: vertices that are not ancestors
/// of an extra-edge endpoint first (they eliminate without fill), then the
/// ancestors, both in reverse-Prim order.
std::vector<std::size_t> augmented_elimination_order(const AugmentedTree& aug,
                                                     const MatrixWeightedGraph& g);

/// Doubling reduction of a generalized block Laplacian (off-diagonal blocks
/// zero or definite of either sign) to an ordinary block Laplacian.
struct GrembanSystem {
  BlockMatrix expanded;  // 2n blocks
  std::size_t original_blocks = 0;

  /// (b; -b)
  BlockVector embed(const BlockVector& b) const;
  /// (x1 - x2) / 2
  BlockVector recover(const BlockVector& x) const;
};

/// Throws NotDefinite for an off-diagonal block of mixed sign and
/// NotDominant when A_ii - sum |A_ij| is not PSD.
GrembanSystem gremban_expand(const BlockMatrix& a);

}  // namespace supportgraph
