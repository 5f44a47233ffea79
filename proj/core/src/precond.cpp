#include "supportgraph/precond.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "supportgraph/errors.hpp"

namespace supportgraph {

namespace {

constexpr double kDefiniteTol = 1e-12;

std::vector<std::vector<std::size_t>> connected_components(const MatrixWeightedGraph& g) {
  const std::size_t n = g.vertex_count();
  std::vector<bool> seen(n, false);
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> stack;
  for (std::size_t s = 0; s < n; ++s) {
    if (seen[s]) continue;
    std::vector<std::size_t> comp;
    seen[s] = true;
    stack.push_back(s);
    while (!stack.empty()) {
      const std::size_t v = stack.back();
      stack.pop_back();
      comp.push_back(v);
      for (const Incidence& inc : g.incident(v))
        if (!seen[inc.neighbor]) {
          seen[inc.neighbor] = true;
          stack.push_back(inc.neighbor);
        }
    }
    std::sort(comp.begin(), comp.end());
    out.push_back(std::move(comp));
  }
  return out;
}

/// Induced subgraph on `vertices` (sorted), relabelled 0..k-1 in that order.
MatrixWeightedGraph induced_subgraph(const MatrixWeightedGraph& g,
                                     const std::vector<std::size_t>& vertices,
                                     std::vector<std::size_t>& local) {
  std::vector<SymBlock> loops;
  loops.reserve(vertices.size());
  for (std::size_t k = 0; k < vertices.size(); ++k) {
    local[vertices[k]] = k;
    loops.push_back(g.self_loop(vertices[k]));
  }
  std::vector<Edge> edges;
  for (std::size_t v : vertices)
    for (const Incidence& inc : g.incident(v))
      if (v < inc.neighbor)
        edges.push_back({local[v], local[inc.neighbor], g.edge(inc.edge).weight});
  return MatrixWeightedGraph(g.dim(), std::move(loops), std::move(edges));
}

bool is_tree_based(StrategyKind k) {
  return k == StrategyKind::Mst || k == StrategyKind::RowMst || k == StrategyKind::AugmentedMst;
}

}  // namespace

Strategy Strategy::parse(std::string_view token) {
  if (token == "identity") return {StrategyKind::Identity, std::nullopt};
  if (token == "jacobi") return {StrategyKind::Jacobi, std::nullopt};
  if (token == "block-jacobi") return {StrategyKind::BlockJacobi, std::nullopt};
  if (token == "mst") return {StrategyKind::Mst, std::nullopt};
  if (token == "row-mst") return {StrategyKind::RowMst, std::nullopt};
  if (token == "aug-mst") return {StrategyKind::AugmentedMst, std::nullopt};
  if (token.starts_with("aug-mst:")) {
    const std::string_view digits = token.substr(8);
    std::size_t t = 0;
    const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), t);
    if (ec != std::errc() || ptr != digits.data() + digits.size() || t == 0)
      throw InputError("bad subtree count in '" + std::string(token) + "'");
    return {StrategyKind::AugmentedMst, t};
  }
  throw InputError("unknown strategy '" + std::string(token) + "'");
}

std::string Strategy::token() const {
  switch (kind) {
    case StrategyKind::Identity: return "identity";
    case StrategyKind::Jacobi: return "jacobi";
    case StrategyKind::BlockJacobi: return "block-jacobi";
    case StrategyKind::Mst: return "mst";
    case StrategyKind::RowMst: return "row-mst";
    case StrategyKind::AugmentedMst:
      return subtrees ? "aug-mst:" + std::to_string(*subtrees) : "aug-mst";
  }
  return "?";
}

std::vector<Strategy> parse_strategy_list(std::string_view list) {
  std::vector<Strategy> out;
  while (!list.empty()) {
    const auto comma = list.find(',');
    const std::string_view tok = list.substr(0, comma);
    if (!tok.empty()) out.push_back(Strategy::parse(tok));
    if (comma == std::string_view::npos) break;
    list.remove_prefix(comma + 1);
  }
  if (out.empty()) throw InputError("empty strategy list");
  return out;
}

std::size_t default_subtree_count(std::size_t n) {
  const auto t = static_cast<std::size_t>(std::llround(std::pow(static_cast<double>(n), 0.25)));
  return std::clamp<std::size_t>(t, 1, std::max<std::size_t>(n, 1));
}

std::vector<std::size_t> augmented_elimination_order(const AugmentedTree& aug,
                                                     const MatrixWeightedGraph& g) {
  const RootedTree& t = aug.base;
  const std::size_t n = t.vertex_count();
  std::vector<bool> ancestor(n, false);
  for (std::size_t e : aug.extra_edges) {
    for (std::size_t v : {g.edge(e).i, g.edge(e).j}) {
      // Walk up until we hit an already-marked vertex; vertices are their own ancestors.
      std::optional<std::size_t> cur = v;
      while (cur && !ancestor[*cur]) {
        ancestor[*cur] = true;
        cur = t.parent(*cur);
      }
    }
  }
  std::vector<std::size_t> order;
  order.reserve(n);
  for (std::size_t v : t.elimination_order())
    if (!ancestor[v]) order.push_back(v);
  for (std::size_t v : t.elimination_order())
    if (ancestor[v]) order.push_back(v);
  return order;
}

Preconditioner Preconditioner::build(const Strategy& strategy, const MatrixWeightedGraph& g) {
  if (!is_tree_based(strategy.kind) || g.vertex_count() == 0 || g.component_count() == 1)
    return build_connected(strategy, g);

  Preconditioner p;
  p.strategy_ = strategy;
  p.n_ = g.vertex_count();
  p.dim_ = g.dim();
  Split split;
  split.components = connected_components(g);
  std::vector<std::size_t> local(p.n_, 0);
  std::vector<SymBlock> loops(p.n_, SymBlock(p.dim_));
  std::vector<Edge> edges;
  for (const auto& comp : split.components) {
    const MatrixWeightedGraph sub = induced_subgraph(g, comp, local);
    Preconditioner part = build_connected(strategy, sub);
    const MatrixWeightedGraph& sg = *part.support_graph();
    for (std::size_t k = 0; k < comp.size(); ++k) loops[comp[k]] = sg.self_loop(k);
    for (const Edge& e : sg.edges()) edges.push_back({comp[e.i], comp[e.j], e.weight});
    p.subtrees_used_ += part.subtrees_used_;
    p.extra_edges_ += part.extra_edges_;
    p.fill_blocks_ += part.fill_blocks_;
    split.parts.push_back(std::move(part));
  }
  split.graph = MatrixWeightedGraph(p.dim_, std::move(loops), std::move(edges));
  p.payload_ = std::move(split);
  return p;
}

Preconditioner Preconditioner::build_connected(const Strategy& strategy,
                                               const MatrixWeightedGraph& g) {
  Preconditioner p;
  p.strategy_ = strategy;
  p.n_ = g.vertex_count();
  p.dim_ = g.dim();
  const std::size_t n = p.n_;
  const std::size_t d = p.dim_;

  switch (strategy.kind) {
    case StrategyKind::Identity:
      p.payload_ = std::monostate{};
      break;

    case StrategyKind::Jacobi: {
      Scalar s;
      s.inverse_diagonal.resize(n * d);
      for (std::size_t v = 0; v < n; ++v) {
        const SymBlock diag = g.diagonal_block(v);
        for (std::size_t k = 0; k < d; ++k) {
          if (!(diag(k, k) > 0.0)) throw NotPositiveDefinite(v, "non-positive diagonal entry");
          s.inverse_diagonal[v * d + k] = 1.0 / diag(k, k);
        }
      }
      p.payload_ = std::move(s);
      break;
    }

    case StrategyKind::BlockJacobi: {
      Blocked b;
      b.diagonal.reserve(n);
      b.factors.reserve(n);
      for (std::size_t v = 0; v < n; ++v) {
        b.diagonal.push_back(g.diagonal_block(v));
        try {
          b.factors.emplace_back(b.diagonal.back());
        } catch (const SingularBlock& e) {
          throw NotPositiveDefinite(v, e.what());
        }
      }
      p.payload_ = std::move(b);
      break;
    }

    case StrategyKind::Mst: {
      RootedTree t = prim_mst(g);
      BlockLDLT f = ldlt_tree(t);
      p.payload_ = Factored{t.weighted(), std::move(f)};
      break;
    }

    case StrategyKind::RowMst: {
      // Keep the tree's off-diagonals but restore Gamma's diagonal blocks by
      // moving every non-tree edge weight into the self-loops.
      const RootedTree t = prim_mst(g);
      std::vector<bool> in_tree(g.edge_count(), false);
      for (std::size_t e : t.source_edges()) in_tree[e] = true;
      std::vector<SymBlock> loops = g.self_loops();
      for (std::size_t e = 0; e < g.edge_count(); ++e) {
        if (in_tree[e]) continue;
        loops[g.edge(e).i] += g.edge(e).weight;
        loops[g.edge(e).j] += g.edge(e).weight;
      }
      RootedTree row_tree = t.with_self_loops(std::move(loops));
      BlockLDLT f = ldlt_tree(row_tree);
      p.payload_ = Factored{row_tree.weighted(), std::move(f)};
      break;
    }

    case StrategyKind::AugmentedMst: {
      const RootedTree t = prim_mst(g);
      const std::size_t parts =
          std::min(strategy.subtrees.value_or(default_subtree_count(n)), n);
      const SubtreePartition part = partition_tree(t, parts);
      AugmentedTree aug = augment_mst(g, t, part);
      const auto order = augmented_elimination_order(aug, g);
      BlockLDLT f = ldlt_general(aug.weighted.laplacian(), order);
      p.subtrees_used_ = part.count;
      p.extra_edges_ = aug.extra_edges.size();
      p.fill_blocks_ = f.offdiagonal_count() - aug.weighted.edge_count();
      p.payload_ = Factored{std::move(aug.weighted), std::move(f)};
      break;
    }
  }
  return p;
}

BlockVector Preconditioner::apply(const BlockVector& r) const {
  if (r.dim() != dim_ || r.blocks() != n_) throw InputError("preconditioner apply: shape mismatch");
  if (std::holds_alternative<std::monostate>(payload_)) return r;
  if (const auto* s = std::get_if<Scalar>(&payload_)) {
    BlockVector z = r;
    for (std::size_t k = 0; k < z.size(); ++k) z[k] *= s->inverse_diagonal[k];
    return z;
  }
  if (const auto* b = std::get_if<Blocked>(&payload_)) {
    BlockVector z = r;
    for (std::size_t v = 0; v < n_; ++v) b->factors[v].solve_in_place(z.block(v));
    return z;
  }
  if (const auto* f = std::get_if<Factored>(&payload_)) return f->factor.solve(r);
  const Split& split = std::get<Split>(payload_);
  BlockVector z(n_, dim_);
  for (std::size_t c = 0; c < split.components.size(); ++c) {
    const auto& comp = split.components[c];
    BlockVector local(comp.size(), dim_);
    for (std::size_t k = 0; k < comp.size(); ++k)
      std::copy_n(r.block(comp[k]).begin(), dim_, local.block(k).begin());
    const BlockVector out = split.parts[c].apply(local);
    for (std::size_t k = 0; k < comp.size(); ++k)
      std::copy_n(out.block(k).begin(), dim_, z.block(comp[k]).begin());
  }
  return z;
}

BlockMatrix Preconditioner::matrix() const {
  BlockMatrix m(n_, dim_);
  if (std::holds_alternative<std::monostate>(payload_)) {
    for (std::size_t v = 0; v < n_; ++v) m.set(v, v, Block::identity(dim_));
  } else if (const auto* s = std::get_if<Scalar>(&payload_)) {
    for (std::size_t v = 0; v < n_; ++v) {
      Block b(dim_);
      for (std::size_t k = 0; k < dim_; ++k) b(k, k) = 1.0 / s->inverse_diagonal[v * dim_ + k];
      m.set(v, v, b);
    }
  } else if (const auto* b = std::get_if<Blocked>(&payload_)) {
    for (std::size_t v = 0; v < n_; ++v) m.set(v, v, b->diagonal[v].block());
  } else {
    m = support_graph()->laplacian();
  }
  return m;
}

const MatrixWeightedGraph* Preconditioner::support_graph() const {
  if (const auto* f = std::get_if<Factored>(&payload_)) return &f->graph;
  if (const auto* s = std::get_if<Split>(&payload_)) return &s->graph;
  return nullptr;
}

std::size_t Preconditioner::components() const noexcept {
  const auto* s = std::get_if<Split>(&payload_);
  return s ? s->components.size() : 1;
}

const BlockLDLT* Preconditioner::factorization() const {
  const auto* f = std::get_if<Factored>(&payload_);
  return f ? &f->factor : nullptr;
}

// ---------------------------------------------------------------------------
// Gremban reduction

BlockVector GrembanSystem::embed(const BlockVector& b) const {
  if (b.blocks() != original_blocks) throw InputError("gremban embed: shape mismatch");
  const std::size_t n = original_blocks;
  BlockVector out(2 * n, b.dim());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < b.dim(); ++k) {
      out.block(i)[k] = b.block(i)[k];
      out.block(n + i)[k] = -b.block(i)[k];
    }
  return out;
}

BlockVector GrembanSystem::recover(const BlockVector& x) const {
  if (x.blocks() != 2 * original_blocks) throw InputError("gremban recover: shape mismatch");
  const std::size_t n = original_blocks;
  BlockVector out(n, x.dim());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < x.dim(); ++k)
      out.block(i)[k] = 0.5 * (x.block(i)[k] - x.block(n + i)[k]);
  return out;
}

GrembanSystem gremban_expand(const BlockMatrix& a) {
  const std::size_t n = a.blocks();
  const std::size_t d = a.dim();
  GrembanSystem out{BlockMatrix(2 * n, d), n};

  for (std::size_t i = 0; i < n; ++i) {
    const SymBlock diag = a.diagonal(i);
    SymBlock slack = diag;
    out.expanded.set(i, i, diag.block());
    out.expanded.set(n + i, n + i, diag.block());
    for (const auto& [j, b] : a.row(i)) {
      if (j == i || b.is_zero()) continue;
      const SymBlock s = SymBlock::symmetrize(b);
      if ((b - s.block()).frobenius_norm() > kDefiniteTol * std::max(1.0, s.frobenius_norm()))
        throw NotDefinite(i, j);
      const SmallEigen eig = sym_eigen(s);
      const double scale = std::max(std::abs(eig.values.front()), std::abs(eig.values.back()));
      const bool positive = eig.values.front() > kDefiniteTol * scale;
      const bool negative = eig.values.back() < -kDefiniteTol * scale;
      if (!positive && !negative) throw NotDefinite(i, j);
      slack -= positive ? s : -s;
      if (i < j) {
        if (negative) {
          out.expanded.set(i, j, s.block());
          out.expanded.set(n + i, n + j, s.block());
        } else {
          out.expanded.set(i, n + j, (-s).block());
          out.expanded.set(n + i, j, (-s).block());
        }
      }
    }
    if (lambda_min(slack) < -1e-12 * std::max(1.0, diag.frobenius_norm())) throw NotDominant(i);
  }
  return out;
}

}  // namespace supportgraph
