#pragma once

// Matrix-weighted graphs, their block Laplacians, and the spanning-tree
// machinery the support graph preconditioners are built from.

#include <cstddef>
#include <iosfwd>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "supportgraph/block_matrix.hpp"
#include "supportgraph/block_vector.hpp"
#include "supportgraph/blockmat.hpp"
#include "supportgraph/dense.hpp"

namespace supportgraph {

inline constexpr std::size_t kNoVertex = std::numeric_limits<std::size_t>::max();
/// assemble_dense refuses matrices with more rows than this.
inline constexpr std::size_t kDenseCapacity = 4096;

struct Edge {
  std::size_t i = 0;  // i < j
  std::size_t j = 0;
  SymBlock weight;
};

struct Incidence {
  std::size_t neighbor;
  std::size_t edge;
};

/// Undirected graph with SPD edge weights and PSD self-loop weights.
/// Immutable once built. Its block Laplacian is the friction matrix.
class MatrixWeightedGraph {
 public:
  MatrixWeightedGraph() = default;
  /// Validates and normalizes: endpoints are swapped so i < j, duplicate and
  /// (i, i) edges are rejected, edge weights must be SPD and self-loops PSD.
  MatrixWeightedGraph(std::size_t dim, std::vector<SymBlock> self_loops,
                      std::vector<Edge> edges);

  std::size_t vertex_count() const noexcept { return self_loops_.size(); }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  std::size_t dim() const noexcept { return dim_; }

  const std::vector<Edge>& edges() const noexcept { return edges_; }
  const Edge& edge(std::size_t e) const { return edges_[e]; }
  const SymBlock& self_loop(std::size_t v) const { return self_loops_[v]; }
  const std::vector<SymBlock>& self_loops() const noexcept { return self_loops_; }

  /// lambda_min of the edge weight; the spanning-tree key.
  double edge_key(std::size_t e) const { return keys_[e]; }
  const std::vector<Incidence>& incident(std::size_t v) const { return adjacency_[v]; }
  std::size_t degree(std::size_t v) const { return adjacency_[v].size(); }
  std::size_t max_degree() const;
  std::size_t component_count() const;

  /// Diagonal block of the Laplacian: w(v, v) + sum of incident weights.
  SymBlock diagonal_block(std::size_t v) const;

  /// Same vertices and self-loops, keeping only the listed edges.
  MatrixWeightedGraph edge_subgraph(const std::vector<std::size_t>& edge_ids) const;
  MatrixWeightedGraph with_self_loops(std::vector<SymBlock> self_loops) const;

  BlockMatrix laplacian() const;

 private:
  std::size_t dim_ = kDefaultBlockDim;
  std::vector<SymBlock> self_loops_;
  std::vector<Edge> edges_;
  std::vector<double> keys_;
  std::vector<std::vector<Incidence>> adjacency_;
};

/// Reads a block Laplacian back as a graph: edge weights are the negated
/// off-diagonal blocks, self-loops the block row sums.
MatrixWeightedGraph graph_from_laplacian(const BlockMatrix& l);

/// L_G v without forming L_G.
BlockVector laplacian_matvec(const MatrixWeightedGraph& g, const BlockVector& v);
void laplacian_matvec(const MatrixWeightedGraph& g, const BlockVector& v, BlockVector& out);

/// Dense (n d) x (n d) block Laplacian. Throws CapacityExceeded above kDenseCapacity rows.
DenseMatrix assemble_dense(const MatrixWeightedGraph& g);

/// Spanning tree rooted at `root`, carrying its own weighted graph (tree
/// edges plus every self-loop of the source graph).
class RootedTree {
 public:
  RootedTree() = default;
  RootedTree(MatrixWeightedGraph weighted, std::size_t root,
             std::vector<std::size_t> parent, std::vector<std::size_t> source_edges,
             std::vector<std::size_t> insertion_order);

  std::size_t vertex_count() const noexcept { return parent_.size(); }
  std::size_t root() const noexcept { return root_; }
  std::optional<std::size_t> parent(std::size_t v) const;
  const std::vector<std::size_t>& children(std::size_t v) const { return children_[v]; }
  /// Index (into the source graph) of the edge to the parent; kNoVertex for the root.
  std::size_t source_edge(std::size_t v) const { return source_edge_[v]; }
  /// Source-graph indices of the n - 1 tree edges.
  std::vector<std::size_t> source_edges() const;
  /// Index (into weighted()) of the edge to the parent.
  std::size_t tree_edge(std::size_t v) const { return tree_edge_[v]; }

  const std::vector<std::size_t>& insertion_order() const noexcept { return insertion_; }
  /// Reverse insertion order: every vertex after all of its children.
  const std::vector<std::size_t>& elimination_order() const noexcept { return elimination_; }
  const MatrixWeightedGraph& weighted() const noexcept { return weighted_; }
  std::size_t depth(std::size_t v) const { return depth_[v]; }

  /// Same topology and order with different self-loops.
  RootedTree with_self_loops(std::vector<SymBlock> self_loops) const;

 private:
  MatrixWeightedGraph weighted_;
  std::size_t root_ = 0;
  std::vector<std::size_t> parent_;
  std::vector<std::size_t> source_edge_;
  std::vector<std::size_t> tree_edge_;
  std::vector<std::vector<std::size_t>> children_;
  std::vector<std::size_t> depth_;
  std::vector<std::size_t> insertion_;
  std::vector<std::size_t> elimination_;
};

/// Maximum spanning tree under the key lambda_min(w(e)) via Prim from
/// vertex 0. Ties go to the lexicographically smaller (i, j).
/// Throws Disconnected.
RootedTree prim_mst(const MatrixWeightedGraph& g);

struct SubtreePartition {
  std::vector<std::size_t> assignment;  // per vertex, in [0, count)
  std::size_t count = 0;
  std::size_t target_size = 0;  // ceil(n / t)

  std::vector<std::size_t> sizes() const;
};

/// Splits the tree into at most t connected subtrees by post-order size
/// accumulation, cutting whenever a subtree reaches ceil(n / t) vertices.
SubtreePartition partition_tree(const RootedTree& t, std::size_t parts);

struct AugmentedTree {
  RootedTree base;
  SubtreePartition partition;
  std::vector<std::size_t> extra_edges;  // source-graph edge ids
  MatrixWeightedGraph weighted;          // tree edges + extra edges + self-loops
};

/// Adds, for every pair of subtrees joined by a non-tree edge of g, the
/// non-tree edge of largest key between them.
AugmentedTree augment_mst(const MatrixWeightedGraph& g, const RootedTree& t,
                          const SubtreePartition& partition);

using SimpleGraph = std::vector<std::vector<std::size_t>>;

SimpleGraph simple_adjacency(const MatrixWeightedGraph& g);

/// Fill edges (u < v) produced by eliminating vertices in `order`, sorted.
std::vector<std::pair<std::size_t, std::size_t>> elimination_fill(
    const SimpleGraph& adjacency, const std::vector<std::size_t>& order);

/// Text form: "n d", then "L i w..." per self-loop and "E i j w..." per edge,
/// with row-major d*d weights.
void write_graph_text(std::ostream& out, const MatrixWeightedGraph& g);
MatrixWeightedGraph read_graph_text(std::istream& in);

}  // namespace supportgraph
