#include "supportgraph/graph.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <queue>
#include <sstream>
#include <string>
#include <tuple>

#include "supportgraph/errors.hpp"

namespace supportgraph {

namespace {

constexpr double kSelfLoopPsdTol = 1e-12;

}  // namespace

MatrixWeightedGraph::MatrixWeightedGraph(std::size_t dim, std::vector<SymBlock> self_loops,
                                         std::vector<Edge> edges)
    : dim_(dim), self_loops_(std::move(self_loops)), edges_(std::move(edges)) {
  if (dim_ == 0) throw InputError("block dimension must be positive");
  const std::size_t n = self_loops_.size();
  for (std::size_t v = 0; v < n; ++v) {
    const SymBlock& s = self_loops_[v];
    if (s.dim() != dim_) throw InputError("self-loop " + std::to_string(v) + " has wrong dimension");
    if (!s.all_finite()) throw InputError("self-loop " + std::to_string(v) + " is not finite");
    if (!s.is_zero() && !is_psd(s, kSelfLoopPsdTol))
      throw InputError("self-loop " + std::to_string(v) + " is not positive semidefinite");
  }

  adjacency_.assign(n, {});
  keys_.reserve(edges_.size());
  std::vector<std::pair<std::size_t, std::size_t>> seen;
  seen.reserve(edges_.size());
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    Edge& ed = edges_[e];
    if (ed.i == ed.j) throw InputError("edge list contains a self-loop at " + std::to_string(ed.i));
    if (ed.i >= n || ed.j >= n) throw InputError("edge endpoint out of range");
    if (ed.i > ed.j) std::swap(ed.i, ed.j);
    if (ed.weight.dim() != dim_) throw InputError("edge weight has wrong dimension");
    if (!ed.weight.all_finite()) throw InputError("edge weight is not finite");
    const double key = lambda_min(ed.weight);
    if (!(key > 0.0))
      throw InputError("edge (" + std::to_string(ed.i) + ", " + std::to_string(ed.j) +
                       ") weight is not positive definite");
    keys_.push_back(key);
    seen.emplace_back(ed.i, ed.j);
    adjacency_[ed.i].push_back({ed.j, e});
    adjacency_[ed.j].push_back({ed.i, e});
  }
  std::sort(seen.begin(), seen.end());
  if (std::adjacent_find(seen.begin(), seen.end()) != seen.end())
    throw InputError("duplicate edge in edge list");
}

std::size_t MatrixWeightedGraph::max_degree() const {
  std::size_t m = 0;
  for (const auto& a : adjacency_) m = std::max(m, a.size());
  return m;
}

std::size_t MatrixWeightedGraph::component_count() const {
  const std::size_t n = vertex_count();
  std::vector<bool> seen(n, false);
  std::vector<std::size_t> stack;
  std::size_t count = 0;
  for (std::size_t s = 0; s < n; ++s) {
    if (seen[s]) continue;
    ++count;
    seen[s] = true;
    stack.push_back(s);
    while (!stack.empty()) {
      const std::size_t v = stack.back();
      stack.pop_back();
      for (const auto& inc : adjacency_[v])
        if (!seen[inc.neighbor]) {
          seen[inc.neighbor] = true;
          stack.push_back(inc.neighbor);
        }
    }
  }
  return count;
}

SymBlock MatrixWeightedGraph::diagonal_block(std::size_t v) const {
  SymBlock d = self_loops_[v];
  for (const auto& inc : adjacency_[v]) d += edges_[inc.edge].weight;
  return d;
}

MatrixWeightedGraph MatrixWeightedGraph::edge_subgraph(
    const std::vector<std::size_t>& edge_ids) const {
  std::vector<Edge> sub;
  sub.reserve(edge_ids.size());
  for (std::size_t e : edge_ids) sub.push_back(edges_.at(e));
  return MatrixWeightedGraph(dim_, self_loops_, std::move(sub));
}

MatrixWeightedGraph MatrixWeightedGraph::with_self_loops(std::vector<SymBlock> self_loops) const {
  if (self_loops.size() != vertex_count()) throw InputError("self-loop count mismatch");
  return MatrixWeightedGraph(dim_, std::move(self_loops), edges_);
}

BlockMatrix MatrixWeightedGraph::laplacian() const {
  BlockMatrix l(vertex_count(), dim_);
  for (std::size_t v = 0; v < vertex_count(); ++v) l.set(v, v, diagonal_block(v));
  for (const Edge& e : edges_) l.set(e.i, e.j, (-e.weight).block());
  return l;
}

MatrixWeightedGraph graph_from_laplacian(const BlockMatrix& l) {
  const std::size_t n = l.blocks();
  const std::size_t d = l.dim();
  std::vector<Edge> edges;
  std::vector<SymBlock> loops(n, SymBlock(d));
  for (std::size_t i = 0; i < n; ++i) {
    const SymBlock diag = l.diagonal(i);
    SymBlock rest = diag;
    for (const auto& [j, b] : l.row(i)) {
      if (j == i) continue;
      SymBlock w = SymBlock::symmetrize(b * -1.0);
      rest -= w;
      if (i < j) edges.push_back({i, j, std::move(w)});
    }
    // Row sums that should vanish come back with rounding noise; clip it.
    const SmallEigen eig = sym_eigen(rest);
    if (eig.values.front() < 0.0) {
      if (eig.values.front() < -1e-10 * std::max(1.0, diag.frobenius_norm()))
        throw NotPositiveDefinite(i, "block row sum is not positive semidefinite");
      SymBlock clipped(d);
      for (std::size_t k = 0; k < d; ++k) {
        const double lam = std::max(eig.values[k], 0.0);
        for (std::size_t r = 0; r < d; ++r)
          for (std::size_t c = r; c < d; ++c)
            clipped.set(r, c, clipped(r, c) + lam * eig.vectors(r, k) * eig.vectors(c, k));
      }
      rest = clipped;
    }
    loops[i] = rest;
  }
  return MatrixWeightedGraph(d, std::move(loops), std::move(edges));
}

void laplacian_matvec(const MatrixWeightedGraph& g, const BlockVector& v, BlockVector& out) {
  const std::size_t n = g.vertex_count();
  const std::size_t d = g.dim();
  if (v.dim() != d || v.blocks() != n) throw InputError("laplacian_matvec: shape mismatch");
  if (!out.same_shape(v)) out = BlockVector(n, d);
  out.fill(0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const SymBlock& w = g.self_loop(i);
    if (!w.is_zero()) multiply_add(w, v.block(i), out.block(i));
  }
  std::vector<double> diff(d);
  for (const Edge& e : g.edges()) {
    const auto vi = v.block(e.i);
    const auto vj = v.block(e.j);
    for (std::size_t k = 0; k < d; ++k) diff[k] = vi[k] - vj[k];
    multiply_add(e.weight, diff, out.block(e.i), 1.0);
    multiply_add(e.weight, diff, out.block(e.j), -1.0);
  }
}

BlockVector laplacian_matvec(const MatrixWeightedGraph& g, const BlockVector& v) {
  BlockVector out(g.vertex_count(), g.dim());
  laplacian_matvec(g, v, out);
  return out;
}

DenseMatrix assemble_dense(const MatrixWeightedGraph& g) {
  const std::size_t n = g.vertex_count();
  const std::size_t d = g.dim();
  if (n * d > kDenseCapacity)
    throw CapacityExceeded("assemble_dense: " + std::to_string(n * d) + " rows exceeds " +
                           std::to_string(kDenseCapacity));
  return g.laplacian().to_dense();
}

// ---------------------------------------------------------------------------
// Rooted trees

RootedTree::RootedTree(MatrixWeightedGraph weighted, std::size_t root,
                       std::vector<std::size_t> parent, std::vector<std::size_t> source_edges,
                       std::vector<std::size_t> insertion_order)
    : weighted_(std::move(weighted)),
      root_(root),
      parent_(std::move(parent)),
      source_edge_(std::move(source_edges)),
      insertion_(std::move(insertion_order)) {
  const std::size_t n = parent_.size();
  if (weighted_.vertex_count() != n || source_edge_.size() != n || insertion_.size() != n)
    throw InputError("rooted tree: inconsistent sizes");
  if (n == 0 || root_ >= n || parent_[root_] != kNoVertex)
    throw InputError("rooted tree: bad root");
  if (weighted_.edge_count() + 1 != n) throw InputError("rooted tree: need n - 1 edges");

  std::map<std::pair<std::size_t, std::size_t>, std::size_t> edge_index;
  for (std::size_t e = 0; e < weighted_.edge_count(); ++e)
    edge_index[{weighted_.edge(e).i, weighted_.edge(e).j}] = e;

  std::vector<std::size_t> position(n, kNoVertex);
  for (std::size_t p = 0; p < n; ++p) {
    const std::size_t v = insertion_[p];
    if (v >= n || position[v] != kNoVertex) throw InputError("rooted tree: bad insertion order");
    position[v] = p;
  }
  if (insertion_.front() != root_) throw InputError("rooted tree: root must be inserted first");

  children_.assign(n, {});
  depth_.assign(n, 0);
  tree_edge_.assign(n, kNoVertex);
  for (std::size_t v : insertion_) {
    if (v == root_) continue;
    const std::size_t p = parent_[v];
    if (p >= n || position[p] >= position[v])
      throw InputError("rooted tree: parent must precede child in insertion order");
    const auto it = edge_index.find({std::min(v, p), std::max(v, p)});
    if (it == edge_index.end()) throw InputError("rooted tree: parent edge missing");
    tree_edge_[v] = it->second;
    children_[p].push_back(v);
    depth_[v] = depth_[p] + 1;
  }
  elimination_.assign(insertion_.rbegin(), insertion_.rend());
}

std::optional<std::size_t> RootedTree::parent(std::size_t v) const {
  if (parent_[v] == kNoVertex) return std::nullopt;
  return parent_[v];
}

std::vector<std::size_t> RootedTree::source_edges() const {
  std::vector<std::size_t> out;
  out.reserve(parent_.size());
  for (std::size_t v = 0; v < parent_.size(); ++v)
    if (source_edge_[v] != kNoVertex) out.push_back(source_edge_[v]);
  std::sort(out.begin(), out.end());
  return out;
}

RootedTree RootedTree::with_self_loops(std::vector<SymBlock> self_loops) const {
  return RootedTree(weighted_.with_self_loops(std::move(self_loops)), root_, parent_,
                    source_edge_, insertion_);
}

RootedTree prim_mst(const MatrixWeightedGraph& g) {
  const std::size_t n = g.vertex_count();
  if (n == 0) throw InputError("prim_mst: empty graph");
  if (const std::size_t c = g.component_count(); c != 1) throw Disconnected(c);

  struct Candidate {
    double key;
    std::size_t i, j;  // edge endpoints, i < j
    std::size_t edge;
    std::size_t target;
  };
  // Max key first, then the lexicographically smaller edge.
  const auto worse = [](const Candidate& a, const Candidate& b) {
    if (a.key != b.key) return a.key < b.key;
    return std::tie(a.i, a.j) > std::tie(b.i, b.j);
  };
  std::priority_queue<Candidate, std::vector<Candidate>, decltype(worse)> frontier(worse);

  std::vector<bool> in_tree(n, false);
  std::vector<std::size_t> parent(n, kNoVertex);
  std::vector<std::size_t> source(n, kNoVertex);
  std::vector<std::size_t> insertion;
  insertion.reserve(n);

  const auto insert = [&](std::size_t v) {
    in_tree[v] = true;
    insertion.push_back(v);
    for (const auto& inc : g.incident(v)) {
      if (in_tree[inc.neighbor]) continue;
      const Edge& e = g.edge(inc.edge);
      frontier.push({g.edge_key(inc.edge), e.i, e.j, inc.edge, inc.neighbor});
    }
  };

  const std::size_t root = 0;
  insert(root);
  while (!frontier.empty()) {
    const Candidate c = frontier.top();
    frontier.pop();
    if (in_tree[c.target]) continue;
    parent[c.target] = c.target == c.i ? c.j : c.i;
    source[c.target] = c.edge;
    insert(c.target);
  }

  std::vector<std::size_t> tree_edges;
  tree_edges.reserve(n - 1);
  for (std::size_t v = 0; v < n; ++v)
    if (source[v] != kNoVertex) tree_edges.push_back(source[v]);
  std::sort(tree_edges.begin(), tree_edges.end());
  return RootedTree(g.edge_subgraph(tree_edges), root, std::move(parent), std::move(source),
                    std::move(insertion));
}

// ---------------------------------------------------------------------------
// Partition and augmentation

std::vector<std::size_t> SubtreePartition::sizes() const {
  std::vector<std::size_t> s(count, 0);
  for (std::size_t a : assignment) ++s[a];
  return s;
}

SubtreePartition partition_tree(const RootedTree& t, std::size_t parts) {
  const std::size_t n = t.vertex_count();
  if (parts == 0 || parts > n) throw InputError("partition_tree: need 1 <= t <= n");
  const std::size_t target = (n + parts - 1) / parts;

  std::vector<std::size_t> pending(n, 0);
  std::vector<bool> cut(n, false);
  for (std::size_t v : t.elimination_order()) {
    std::size_t acc = 1;
    for (std::size_t c : t.children(v))
      if (!cut[c]) acc += pending[c];
    pending[v] = acc;
    cut[v] = acc >= target || v == t.root();
  }

  SubtreePartition out;
  out.target_size = target;
  out.assignment.assign(n, 0);
  for (std::size_t v : t.insertion_order()) {
    if (cut[v]) {
      out.assignment[v] = out.count++;
    } else {
      out.assignment[v] = out.assignment[*t.parent(v)];
    }
  }
  return out;
}

AugmentedTree augment_mst(const MatrixWeightedGraph& g, const RootedTree& t,
                          const SubtreePartition& partition) {
  if (partition.assignment.size() != g.vertex_count() || t.vertex_count() != g.vertex_count())
    throw InputError("augment_mst: size mismatch");
  std::vector<bool> in_tree(g.edge_count(), false);
  for (std::size_t e : t.source_edges()) in_tree[e] = true;

  std::map<std::pair<std::size_t, std::size_t>, std::size_t> best;
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    if (in_tree[e]) continue;
    const Edge& ed = g.edge(e);
    const std::size_t a = partition.assignment[ed.i];
    const std::size_t b = partition.assignment[ed.j];
    if (a == b) continue;
    const auto key = std::make_pair(std::min(a, b), std::max(a, b));
    auto it = best.find(key);
    if (it == best.end()) {
      best.emplace(key, e);
      continue;
    }
    const Edge& cur = g.edge(it->second);
    const double kc = g.edge_key(it->second);
    const double ke = g.edge_key(e);
    if (ke > kc || (ke == kc && std::tie(ed.i, ed.j) < std::tie(cur.i, cur.j))) it->second = e;
  }

  AugmentedTree out{t, partition, {}, {}};
  std::vector<std::size_t> ids = t.source_edges();
  for (const auto& [pair, e] : best) {
    out.extra_edges.push_back(e);
    ids.push_back(e);
  }
  std::sort(ids.begin(), ids.end());
  out.weighted = g.edge_subgraph(ids);
  return out;
}

// ---------------------------------------------------------------------------
// Elimination game

SimpleGraph simple_adjacency(const MatrixWeightedGraph& g) {
  SimpleGraph adj(g.vertex_count());
  for (const Edge& e : g.edges()) {
    adj[e.i].push_back(e.j);
    adj[e.j].push_back(e.i);
  }
  return adj;
}

std::vector<std::pair<std::size_t, std::size_t>> elimination_fill(
    const SimpleGraph& adjacency, const std::vector<std::size_t>& order) {
  const std::size_t n = adjacency.size();
  if (order.size() != n) throw InputError("elimination_fill: order is not a permutation");
  std::vector<std::size_t> position(n, kNoVertex);
  for (std::size_t p = 0; p < n; ++p) {
    if (order[p] >= n || position[order[p]] != kNoVertex)
      throw InputError("elimination_fill: order is not a permutation");
    position[order[p]] = p;
  }

  std::vector<std::vector<std::size_t>> sorted_adj(n);
  for (std::size_t v = 0; v < n; ++v) {
    sorted_adj[v] = adjacency[v];
    std::sort(sorted_adj[v].begin(), sorted_adj[v].end());
  }
  const auto adjacent = [&](std::size_t u, std::size_t v) {
    return std::binary_search(sorted_adj[u].begin(), sorted_adj[u].end(), v);
  };

  // Column structures in elimination positions. The uneliminated neighbors
  // of p at its elimination are its later original neighbors plus whatever
  // its elimination-tree children passed up.
  std::vector<std::vector<std::size_t>> merged(n);
  std::vector<std::pair<std::size_t, std::size_t>> fill;
  for (std::size_t p = 0; p < n; ++p) {
    const std::size_t v = order[p];
    std::vector<std::size_t>& s = merged[p];
    for (std::size_t u : adjacency[v])
      if (position[u] > p) s.push_back(position[u]);
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    if (s.empty()) continue;
    for (std::size_t q : s) {
      const std::size_t u = order[q];
      if (!adjacent(v, u)) fill.emplace_back(std::min(u, v), std::max(u, v));
    }
    // Hand the rest of the clique to the elimination-tree parent.
    const std::size_t parent = s.front();
    std::vector<std::size_t>& ps = merged[parent];
    ps.insert(ps.end(), s.begin() + 1, s.end());
    std::vector<std::size_t>().swap(s);
  }
  std::sort(fill.begin(), fill.end());
  fill.erase(std::unique(fill.begin(), fill.end()), fill.end());
  return fill;
}

// ---------------------------------------------------------------------------
// Text serialization

void write_graph_text(std::ostream& out, const MatrixWeightedGraph& g) {
  const std::size_t d = g.dim();
  const auto old_precision = out.precision(17);
  out << g.vertex_count() << ' ' << d << '\n';
  const auto write_block = [&](const SymBlock& w) {
    for (std::size_t r = 0; r < d; ++r)
      for (std::size_t c = 0; c < d; ++c) out << ' ' << w(r, c);
    out << '\n';
  };
  for (std::size_t v = 0; v < g.vertex_count(); ++v) {
    out << "L " << v;
    write_block(g.self_loop(v));
  }
  for (const Edge& e : g.edges()) {
    out << "E " << e.i << ' ' << e.j;
    write_block(e.weight);
  }
  out.precision(old_precision);
}

MatrixWeightedGraph read_graph_text(std::istream& in) {
  std::string line;
  std::size_t n = 0;
  std::size_t d = 0;
  bool have_header = false;
  std::vector<SymBlock> loops;
  std::vector<Edge> edges;
  std::size_t line_no = 0;

  const auto fail = [&](const std::string& why) {
    throw InputError("graph text line " + std::to_string(line_no) + ": " + why);
  };
  const auto read_block = [&](std::istringstream& ls) {
    Block b(d);
    for (std::size_t r = 0; r < d; ++r)
      for (std::size_t c = 0; c < d; ++c)
        if (!(ls >> b(r, c))) fail("expected " + std::to_string(d * d) + " weight entries");
    std::string extra;
    if (ls >> extra) fail("trailing tokens");
    for (std::size_t r = 0; r < d; ++r)
      for (std::size_t c = r + 1; c < d; ++c)
        if (b(r, c) != b(c, r)) fail("weight is not symmetric");
    return SymBlock::symmetrize(b);
  };

  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    if (!have_header) {
      if (!(ls >> n >> d) || d == 0) fail("expected header 'n d'");
      loops.assign(n, SymBlock(d));
      have_header = true;
      continue;
    }
    std::string tag;
    ls >> tag;
    if (tag == "L") {
      std::size_t i = 0;
      if (!(ls >> i) || i >= n) fail("bad self-loop vertex");
      loops[i] = read_block(ls);
    } else if (tag == "E") {
      std::size_t i = 0;
      std::size_t j = 0;
      if (!(ls >> i >> j)) fail("bad edge endpoints");
      edges.push_back({i, j, read_block(ls)});
    } else {
      fail("unknown record '" + tag + "'");
    }
  }
  if (!have_header) throw InputError("graph text: missing header");
  return MatrixWeightedGraph(d, std::move(loops), std::move(edges));
}

}  // namespace supportgraph
