#include "supportgraph/factor.hpp"

#include <algorithm>

#include "supportgraph/errors.hpp"

namespace supportgraph {

void BlockLDLT::init(std::size_t dim, std::vector<std::size_t> order) {
  const std::size_t n = order.size();
  dim_ = dim;
  order_ = std::move(order);
  position_.assign(n, kNoVertex);
  for (std::size_t p = 0; p < n; ++p) {
    const std::size_t v = order_[p];
    if (v >= n || position_[v] != kNoVertex)
      throw InputError("elimination order is not a permutation");
    position_[v] = p;
  }
  d_.assign(n, SymBlock(dim));
  d_factor_.assign(n, BlockCholesky());
  rows_.assign(n, {});
}

void BlockLDLT::set_pivot(std::size_t pos, SymBlock pivot) {
  const std::size_t vertex = order_[pos];
  if (!pivot.all_finite()) throw NotPositiveDefinite(vertex, "non-finite pivot");
  const double lmin = lambda_min(pivot);
  if (lmin <= kPivotTolerance * pivot.frobenius_norm() || !(lmin > 0.0))
    throw NotPositiveDefinite(vertex, "pivot lambda_min = " + std::to_string(lmin));
  try {
    d_factor_[pos] = BlockCholesky(pivot);
  } catch (const SingularBlock& e) {
    throw NotPositiveDefinite(vertex, e.what());
  }
  d_[pos] = std::move(pivot);
}

Block BlockLDLT::l(std::size_t row, std::size_t col) const {
  if (row == col) return Block::identity(dim_);
  if (col < row) {
    const auto& r = rows_[row];
    const auto it = std::lower_bound(r.begin(), r.end(), col,
                                     [](const Entry& e, std::size_t c) { return e.col < c; });
    if (it != r.end() && it->col == col) return it->value;
  }
  return Block(dim_);
}

std::size_t BlockLDLT::offdiagonal_count() const {
  std::size_t s = 0;
  for (const auto& r : rows_) s += r.size();
  return s;
}

std::vector<std::pair<std::size_t, std::size_t>> BlockLDLT::lower_pattern() const {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t p = 0; p < rows_.size(); ++p)
    for (const Entry& e : rows_[p]) out.emplace_back(order_[p], order_[e.col]);
  std::sort(out.begin(), out.end());
  return out;
}

BlockVector BlockLDLT::solve(const BlockVector& b, BlockOpCounter* counter) const {
  const std::size_t n = blocks();
  if (b.dim() != dim_ || b.blocks() != n) throw InputError("LDL^T solve: shape mismatch");
  BlockOpCounter local;

  BlockVector z(n, dim_);
  for (std::size_t p = 0; p < n; ++p) {
    const auto src = b.block(order_[p]);
    std::copy(src.begin(), src.end(), z.block(p).begin());
  }

  // L z = b
  for (std::size_t p = 0; p < n; ++p)
    for (const Entry& e : rows_[p]) {
      multiply_add(e.value, z.block(e.col), z.block(p), -1.0);
      ++local.offdiagonal_applications;
    }

  // D y = z
  for (std::size_t p = 0; p < n; ++p) {
    d_factor_[p].solve_in_place(z.block(p));
    ++local.diagonal_solves;
  }

  // L^T x = y; row p is final once every later row has pushed into it.
  for (std::size_t p = n; p-- > 0;)
    for (const Entry& e : rows_[p]) {
      multiply_transpose_add(e.value, z.block(p), z.block(e.col), -1.0);
      ++local.offdiagonal_applications;
    }

  BlockVector x(n, dim_);
  for (std::size_t p = 0; p < n; ++p) {
    const auto src = z.block(p);
    std::copy(src.begin(), src.end(), x.block(order_[p]).begin());
  }
  if (counter) {
    counter->offdiagonal_applications += local.offdiagonal_applications;
    counter->diagonal_solves += local.diagonal_solves;
  }
  return x;
}

DenseMatrix BlockLDLT::reconstruct() const {
  const std::size_t n = blocks();
  const std::size_t d = dim_;
  if (n * d > kDenseCapacity) throw CapacityExceeded("reconstruct: matrix too large");
  // Column p of L in positions, as (row, block) pairs including the diagonal.
  std::vector<std::vector<std::pair<std::size_t, const Block*>>> cols(n);
  const Block eye = Block::identity(d);
  for (std::size_t p = 0; p < n; ++p) {
    cols[p].emplace_back(p, &eye);
    for (const Entry& e : rows_[p]) cols[e.col].emplace_back(p, &e.value);
  }
  DenseMatrix m(n * d);
  for (std::size_t k = 0; k < n; ++k)
    for (const auto& [i, li] : cols[k]) {
      const Block left = *li * d_[k].block();
      for (const auto& [j, lj] : cols[k]) {
        const Block prod = left * lj->transposed();
        const std::size_t vi = order_[i];
        const std::size_t vj = order_[j];
        for (std::size_t r = 0; r < d; ++r)
          for (std::size_t c = 0; c < d; ++c) m(vi * d + r, vj * d + c) += prod(r, c);
      }
    }
  return m;
}

BlockLDLT ldlt_general(const BlockMatrix& a, const std::vector<std::size_t>& order) {
  const std::size_t n = a.blocks();
  const std::size_t d = a.dim();
  if (order.size() != n) throw InputError("ldlt_general: order has wrong length");
  BlockLDLT f;
  f.init(d, order);

  // Symbolic phase: pattern of L = original off-diagonal pattern + fill.
  SimpleGraph adjacency(n);
  for (std::size_t i = 0; i < n; ++i)
    for (const auto& [j, b] : a.row(i))
      if (j != i) adjacency[i].push_back(j);
  std::vector<std::vector<std::size_t>> below(n);  // column p: rows q > p
  const auto add_pattern = [&](std::size_t u, std::size_t v) {
    const std::size_t pu = f.position_[u];
    const std::size_t pv = f.position_[v];
    below[std::min(pu, pv)].push_back(std::max(pu, pv));
  };
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j : adjacency[i])
      if (i < j) add_pattern(i, j);
  for (const auto& [u, v] : elimination_fill(adjacency, order)) add_pattern(u, v);
  for (auto& c : below) std::sort(c.begin(), c.end());

  const Block zero(d);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t vi = order[i];

    // D_ii = A_ii - sum_j L_ij D_jj L_ij^T
    SymBlock pivot = a.diagonal(vi);
    for (const auto& e : f.rows_[i]) pivot -= congruence(e.value, f.d_[e.col]);
    f.set_pivot(i, std::move(pivot));
    const BlockCholesky& dinv = f.d_factor_[i];

    // L_ji = (A_ji - sum_k L_jk D_kk L_ik^T) D_ii^{-1}
    for (std::size_t j : below[i]) {
      const Block* aji = a.find(order[j], vi);
      Block rhs = aji ? *aji : zero;
      const auto& ri = f.rows_[i];
      const auto& rj = f.rows_[j];
      auto ii = ri.begin();
      auto jj = rj.begin();
      while (ii != ri.end() && jj != rj.end()) {
        if (ii->col < jj->col) {
          ++ii;
        } else if (jj->col < ii->col) {
          ++jj;
        } else {
          rhs -= jj->value * f.d_[ii->col].block() * ii->value.transposed();
          ++ii;
          ++jj;
        }
      }
      // rhs D^{-1} = (D^{-1} rhs^T)^T since D is symmetric.
      f.rows_[j].push_back({i, dinv.solve(rhs.transposed()).transposed()});
    }
  }
  return f;
}

BlockLDLT ldlt_tree(const RootedTree& t) {
  const MatrixWeightedGraph& g = t.weighted();
  const std::size_t n = t.vertex_count();
  BlockLDLT f;
  f.init(g.dim(), t.elimination_order());

  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t v = f.order_[i];
    for (std::size_t c : t.children(v))
      if (f.position_[c] > i)
        throw InputError("ldlt_tree: elimination order visits a parent before its child");

    // Only children precede v and touch it, so their rows are all of row i.
    SymBlock pivot = g.diagonal_block(v);
    for (const auto& e : f.rows_[i]) pivot -= congruence(e.value, f.d_[e.col]);
    f.set_pivot(i, std::move(pivot));

    if (const auto parent = t.parent(v)) {
      const Block a_pv = (-g.edge(t.tree_edge(v)).weight).block();
      const std::size_t pp = f.position_[*parent];
      f.rows_[pp].push_back({i, f.d_factor_[i].solve(a_pv.transposed()).transposed()});
    }
  }
  return f;
}

BlockVector tree_solve(const BlockLDLT& f, const BlockVector& b, BlockOpCounter* counter) {
  return f.solve(b, counter);
}

}  // namespace supportgraph
