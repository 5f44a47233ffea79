#include <doctest.h>

#include <cmath>
#include <numeric>
#include <set>

#include "oracles.hpp"
#include "supportgraph/errors.hpp"
#include "supportgraph/factor.hpp"

using namespace supportgraph;

namespace {

double rel_diff(const DenseMatrix& a, const oracle::Matrix& b) {
  double err = 0.0, ref = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a.size(); ++j) {
      err += (a(i, j) - b[i][j]) * (a(i, j) - b[i][j]);
      ref += b[i][j] * b[i][j];
    }
  return std::sqrt(err / ref);
}

BlockVector random_vector(SplitMix64& rng, std::size_t n, std::size_t d = 3) {
  BlockVector v(n, d);
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = rng.normal();
  return v;
}

std::vector<std::size_t> identity_order(std::size_t n) {
  std::vector<std::size_t> o(n);
  std::iota(o.begin(), o.end(), 0);
  return o;
}

/// Random SPD block matrix with a random sparsity pattern.
BlockMatrix random_spd_blocks(SplitMix64& rng, std::size_t n, std::size_t d, double density) {
  // A Laplacian with SPD self-loops is SPD.
  auto g = oracle::random_graph(rng, n, {.dim = d, .extra_edge_probability = density});
  std::vector<SymBlock> loops;
  for (std::size_t v = 0; v < n; ++v) loops.push_back(oracle::random_spd(rng, d, 0.2));
  return g.with_self_loops(loops).laplacian();
}

oracle::Matrix to_oracle(const DenseMatrix& m) {
  oracle::Matrix o = oracle::zeros(m.size());
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < m.size(); ++j) o[i][j] = m(i, j);
  return o;
}

/// Two vertices joined by weight I with self-loops I: [[2I, -I], [-I, 2I]].
MatrixWeightedGraph two_vertex_tree() {
  return MatrixWeightedGraph(3, {SymBlock::identity(3), SymBlock::identity(3)},
                             {{0, 1, SymBlock::identity(3)}});
}

}  // namespace

TEST_SUITE("factor") {
  TEST_CASE("general factorization of the identity") {
    BlockMatrix a(4, 3);
    for (std::size_t i = 0; i < 4; ++i) a.set(i, i, Block::identity(3));
    const BlockLDLT f = ldlt_general(a, identity_order(4));
    CHECK(f.offdiagonal_count() == 0);
    for (std::size_t p = 0; p < 4; ++p) CHECK(f.d(p).block() == Block::identity(3));
  }

  TEST_CASE("general factorization of the 2x2 model problem") {
    BlockMatrix a(2, 3);
    a.set(0, 0, Block::identity(3, 2.0));
    a.set(1, 1, Block::identity(3, 2.0));
    a.set(1, 0, Block::identity(3, -1.0));
    const BlockLDLT f = ldlt_general(a, {0, 1});
    CHECK((f.d(0).block() - Block::identity(3, 2.0)).frobenius_norm() < 1e-15);
    CHECK((f.d(1).block() - Block::identity(3, 1.5)).frobenius_norm() < 1e-15);
    CHECK((f.l(1, 0) - Block::identity(3, -0.5)).frobenius_norm() < 1e-15);
    CHECK((f.reconstruct() - a.to_dense()).frobenius_norm() < 1e-14);
  }

  TEST_CASE("general factorization reconstructs random SPD matrices") {
    SplitMix64 rng(1);
    for (int trial = 0; trial < 10; ++trial) {
      const BlockMatrix a = random_spd_blocks(rng, 10, 3, 0.4);
      std::vector<std::size_t> order = identity_order(10);
      for (std::size_t i = 10; i > 1; --i) std::swap(order[i - 1], order[rng.next() % i]);
      const BlockLDLT f = ldlt_general(a, order);
      const auto dense = to_oracle(a.to_dense());
      CHECK(rel_diff(f.reconstruct(), dense) <= 1e-10);
      for (std::size_t p = 0; p < 10; ++p) CHECK(lambda_min(f.d(p)) > 0.0);
    }
  }

  TEST_CASE("general factorization with non-symmetric off-diagonal blocks") {
    // Off-diagonal blocks of a symmetric matrix need not be symmetric
    // themselves, which exercises the transposes.
    SplitMix64 rng(2);
    const std::size_t n = 6, d = 3;
    oracle::Matrix m = oracle::zeros(n * d);
    std::vector<std::vector<double>> g(n * d, std::vector<double>(n * d));
    for (auto& row : g)
      for (double& v : row) v = rng.uniform(-1.0, 1.0);
    for (std::size_t i = 0; i < n * d; ++i)
      for (std::size_t j = 0; j < n * d; ++j) {
        for (std::size_t k = 0; k < n * d; ++k) m[i][j] += g[i][k] * g[j][k];
        if (i == j) m[i][j] += 0.5;
      }
    DenseMatrix dm(n * d);
    for (std::size_t i = 0; i < n * d; ++i)
      for (std::size_t j = 0; j < n * d; ++j) dm(i, j) = m[i][j];
    const BlockMatrix a = BlockMatrix::from_dense(dm, d);
    const BlockLDLT f = ldlt_general(a, {3, 1, 5, 0, 2, 4});
    CHECK(rel_diff(f.reconstruct(), m) <= 1e-10);
    const BlockVector b = random_vector(rng, n);
    const BlockVector x = f.solve(b);
    const auto want = oracle::gauss_solve(m, b.raw());
    for (std::size_t k = 0; k < want.size(); ++k) CHECK(x[k] == doctest::Approx(want[k]).epsilon(1e-9));
  }

  TEST_CASE("general factorization pattern equals the elimination game") {
    SplitMix64 rng(3);
    for (int trial = 0; trial < 20; ++trial) {
      const std::size_t n = 12;
      const auto g = oracle::random_graph(rng, n, {.extra_edge_probability = 0.15});
      std::vector<SymBlock> loops(n, SymBlock::identity(3));
      const auto lap = g.with_self_loops(loops).laplacian();
      std::vector<std::size_t> order = identity_order(n);
      for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.next() % i]);
      const BlockLDLT f = ldlt_general(lap, order);
      std::vector<std::pair<std::size_t, std::size_t>> ends;
      for (const Edge& e : g.edges()) ends.emplace_back(e.i, e.j);
      auto expected = oracle::elimination_game(n, ends, order);
      expected.insert(ends.begin(), ends.end());
      std::set<std::pair<std::size_t, std::size_t>> got;
      for (auto [later, earlier] : f.lower_pattern())
        got.insert({std::min(later, earlier), std::max(later, earlier)});
      CHECK(got == expected);
    }
  }

  TEST_CASE("general factorization rejects indefinite pivots") {
    BlockMatrix a(2, 3);
    a.set(0, 0, Block::identity(3));
    a.set(1, 1, Block::identity(3));
    a.set(1, 0, Block::identity(3, 2.0));
    try {
      ldlt_general(a, {0, 1});
      FAIL("expected NotPositiveDefinite");
    } catch (const NotPositiveDefinite& e) {
      CHECK(e.index() == 1);
    }
    BlockMatrix z(2, 3);
    z.set(0, 0, Block::identity(3));
    CHECK_THROWS_AS(ldlt_general(z, {0, 1}), NotPositiveDefinite);
    CHECK_THROWS_AS(ldlt_general(z, {0, 0}), InputError);
  }

  TEST_CASE("tree factorization of the two-vertex tree") {
    const RootedTree t = prim_mst(two_vertex_tree());
    // Rooted at 0, so vertex 1 is the leaf and is eliminated first.
    CHECK(t.elimination_order() == std::vector<std::size_t>{1, 0});
    const BlockLDLT f = ldlt_tree(t);
    CHECK((f.d(0).block() - Block::identity(3, 2.0)).frobenius_norm() < 1e-15);
    CHECK((f.d(1).block() - Block::identity(3, 1.5)).frobenius_norm() < 1e-15);
    CHECK((f.l(1, 0) - Block::identity(3, -0.5)).frobenius_norm() < 1e-15);
    const BlockLDLT g = ldlt_general(t.weighted().laplacian(), t.elimination_order());
    CHECK((f.l(1, 0) - g.l(1, 0)).frobenius_norm() < 1e-15);
  }

  TEST_CASE("identity-weighted trees") {
    SplitMix64 rng(4);
    for (int trial = 0; trial < 10; ++trial) {
      const std::size_t n = 2 + rng.next() % 40;
      std::vector<Edge> edges;
      for (auto [i, j] : oracle::random_tree_edges(rng, n)) edges.push_back({i, j, SymBlock::identity(3)});
      const MatrixWeightedGraph g(3, std::vector<SymBlock>(n, SymBlock::identity(3)), edges);
      const RootedTree t = prim_mst(g);
      const BlockLDLT f = ldlt_tree(t);
      // With identity edge weights every L block is -D^{-1} of the child pivot,
      // and all blocks stay scalar multiples of I.
      for (std::size_t p = 0; p < n; ++p)
        for (const auto& e : f.row(p)) {
          const Block want = -1.0 * BlockCholesky(f.d(e.col)).inverse().block();
          CHECK((e.value - want).frobenius_norm() < 1e-14);
        }
      CHECK(rel_diff(f.reconstruct(), oracle::laplacian(g)) <= 1e-12);
    }
  }

  TEST_CASE("tree factorization pattern equals the tree") {
    SplitMix64 rng(5);
    const auto g = oracle::random_graph(rng, 200, {.extra_edge_probability = 0.02});
    const RootedTree t = prim_mst(g);
    std::vector<SymBlock> loops(200, SymBlock::identity(3, 0.5));
    const BlockLDLT f = ldlt_tree(t.with_self_loops(loops));
    std::set<std::pair<std::size_t, std::size_t>> tree;
    for (const Edge& e : t.weighted().edges()) tree.insert({e.i, e.j});
    std::set<std::pair<std::size_t, std::size_t>> got;
    for (auto [later, earlier] : f.lower_pattern()) got.insert({std::min(later, earlier), std::max(later, earlier)});
    CHECK(got == tree);
    CHECK(f.offdiagonal_count() == 199);
  }

  TEST_CASE("tree and general factorizations agree") {
    SplitMix64 rng(6);
    for (int trial = 0; trial < 20; ++trial) {
      const auto g = oracle::random_tree_graph(rng, 2 + rng.next() % 60);
      const RootedTree t = prim_mst(g);
      const BlockLDLT ft = ldlt_tree(t);
      const BlockLDLT fg = ldlt_general(t.weighted().laplacian(), t.elimination_order());
      double err = 0.0, ref = 0.0;
      for (std::size_t p = 0; p < ft.blocks(); ++p) {
        err += std::pow((ft.d(p) - fg.d(p)).frobenius_norm(), 2);
        ref += std::pow(fg.d(p).frobenius_norm(), 2);
        for (const auto& e : fg.row(p)) {
          err += std::pow((ft.l(p, e.col) - e.value).frobenius_norm(), 2);
          ref += std::pow(e.value.frobenius_norm(), 2);
        }
      }
      CHECK(std::sqrt(err / ref) <= 1e-12);
    }
  }

  TEST_CASE("tree factorization needs a nonsingular Laplacian") {
    MatrixWeightedGraph g(3, {SymBlock(3), SymBlock(3)}, {{0, 1, SymBlock::identity(3)}});
    CHECK_THROWS_AS(ldlt_tree(prim_mst(g)), NotPositiveDefinite);
  }

  TEST_CASE("tree solve on a single vertex") {
    const MatrixWeightedGraph g(3, {SymBlock::identity(3)}, {});
    const BlockLDLT f = ldlt_tree(prim_mst(g));
    SplitMix64 rng(7);
    const BlockVector b = random_vector(rng, 1);
    CHECK(tree_solve(f, b) == b);
  }

  TEST_CASE("tree solve on the two-vertex tree") {
    const auto g = two_vertex_tree();
    const BlockLDLT f = ldlt_tree(prim_mst(g));
    BlockVector b(2, 3);
    b.block(0)[0] = 1.0;
    b.block(1)[0] = 1.0;
    const BlockVector x = tree_solve(f, b);
    const BlockVector r = laplacian_matvec(g, x) - b;
    CHECK(norm2(r) <= 1e-12 * norm2(b));
    CHECK(x.block(0)[0] == doctest::Approx(1.0));
  }

  TEST_CASE("tree solve agrees with a dense solve") {
    SplitMix64 rng(8);
    const auto g = oracle::random_tree_graph(rng, 100);
    const BlockLDLT f = ldlt_tree(prim_mst(g));
    const BlockVector b = random_vector(rng, 100);
    const BlockVector x = tree_solve(f, b);
    const auto want = oracle::gauss_solve(oracle::laplacian(g), b.raw());
    double err = 0.0, ref = 0.0;
    for (std::size_t k = 0; k < want.size(); ++k) {
      err += (x[k] - want[k]) * (x[k] - want[k]);
      ref += want[k] * want[k];
    }
    CHECK(std::sqrt(err / ref) <= 1e-9);
  }

  TEST_CASE("tree solve operation count is linear") {
    SplitMix64 rng(9);
    for (std::size_t n : {1u, 2u, 10u, 500u}) {
      const BlockLDLT f = ldlt_tree(prim_mst(oracle::random_tree_graph(rng, n)));
      BlockOpCounter c;
      tree_solve(f, random_vector(rng, n), &c);
      CHECK(c.offdiagonal_applications == 2 * (n - 1));
      CHECK(c.diagonal_solves == n);
    }
  }

  TEST_CASE("solve rejects mismatched shapes") {
    const BlockLDLT f = ldlt_tree(prim_mst(two_vertex_tree()));
    CHECK_THROWS_AS(f.solve(BlockVector(3, 3)), InputError);
  }

  TEST_CASE("augmented order produces fill only among ancestors") {
    SplitMix64 rng(10);
    for (int trial = 0; trial < 10; ++trial) {
      const auto g = oracle::random_graph(rng, 40, {.extra_edge_probability = 0.05});
      const RootedTree t = prim_mst(g);
      const auto aug = augment_mst(g, t, partition_tree(t, 3));
      std::vector<bool> ancestor(40, false);
      for (std::size_t e : aug.extra_edges)
        for (std::size_t v : {g.edge(e).i, g.edge(e).j})
          for (std::optional<std::size_t> cur = v; cur; cur = t.parent(*cur)) ancestor[*cur] = true;
      std::vector<std::size_t> order;
      for (std::size_t v : t.elimination_order())
        if (!ancestor[v]) order.push_back(v);
      for (std::size_t v : t.elimination_order())
        if (ancestor[v]) order.push_back(v);
      std::vector<SymBlock> loops(40, SymBlock::identity(3));
      const BlockLDLT f = ldlt_general(aug.weighted.with_self_loops(loops).laplacian(), order);
      const auto fill = elimination_fill(simple_adjacency(aug.weighted), order);
      for (auto [a, b] : fill) {
        CHECK(ancestor[a]);
        CHECK(ancestor[b]);
      }
      CHECK(f.offdiagonal_count() == aug.weighted.edge_count() + fill.size());
    }
  }
}
