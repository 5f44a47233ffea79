#include <benchmark/benchmark.h>

#include "supportgraph/cells.hpp"
#include "supportgraph/factor.hpp"
#include "supportgraph/graph.hpp"
#include "supportgraph/krylov.hpp"
#include "supportgraph/precond.hpp"

using namespace supportgraph;

namespace {

// Hex clusters are connected, so the spanning tree covers every cell.
MatrixWeightedGraph hex_graph(std::size_t shells) {
  ScenarioSpec spec;
  spec.type = ScenarioType::HexLattice;
  spec.shells = shells;
  spec.sigma = 0.05;
  return build_collision_graph(generate_scenario(spec, spec.seed), spec.friction);
}

BlockVector hex_rhs(std::size_t shells) {
  ScenarioSpec spec;
  spec.type = ScenarioType::HexLattice;
  spec.shells = shells;
  spec.sigma = 0.05;
  return assemble_rhs(generate_scenario(spec, spec.seed), ForceModel::Random, 7);
}

void BM_Matvec(benchmark::State& state) {
  const auto g = hex_graph(static_cast<std::size_t>(state.range(0)));
  const BlockVector v = hex_rhs(static_cast<std::size_t>(state.range(0)));
  BlockVector out(v.blocks(), v.dim());
  for (auto _ : state) {
    laplacian_matvec(g, v, out);
    benchmark::DoNotOptimize(out);
  }
  state.counters["vertices"] = static_cast<double>(g.vertex_count());
  state.counters["edges"] = static_cast<double>(g.edge_count());
}
BENCHMARK(BM_Matvec)->Arg(4)->Arg(8)->Arg(12);

void BM_PrimMst(benchmark::State& state) {
  const auto g = hex_graph(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(prim_mst(g));
  state.counters["vertices"] = static_cast<double>(g.vertex_count());
}
BENCHMARK(BM_PrimMst)->Arg(4)->Arg(8)->Arg(12);

void BM_LdltTree(benchmark::State& state) {
  const auto t = prim_mst(hex_graph(static_cast<std::size_t>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(ldlt_tree(t));
}
BENCHMARK(BM_LdltTree)->Arg(4)->Arg(8)->Arg(12);

void BM_TreeSolve(benchmark::State& state) {
  const auto shells = static_cast<std::size_t>(state.range(0));
  const auto f = ldlt_tree(prim_mst(hex_graph(shells)));
  const BlockVector b = hex_rhs(shells);
  for (auto _ : state) benchmark::DoNotOptimize(tree_solve(f, b));
}
BENCHMARK(BM_TreeSolve)->Arg(4)->Arg(8)->Arg(12);

void BM_Pcg(benchmark::State& state, const char* token) {
  const std::size_t shells = 6;
  const auto g = hex_graph(shells);
  const BlockVector b = hex_rhs(shells);
  const auto m = Preconditioner::build(parse_strategy_list(token).front(), g);
  const auto a = graph_operator(g);
  std::size_t iterations = 0;
  for (auto _ : state) {
    const auto result = pcg(a, b, m);
    iterations = result.record.iterations;
    benchmark::DoNotOptimize(result.x);
  }
  state.counters["iterations"] = static_cast<double>(iterations);
}
BENCHMARK_CAPTURE(BM_Pcg, identity, "identity");
BENCHMARK_CAPTURE(BM_Pcg, jacobi, "jacobi");
BENCHMARK_CAPTURE(BM_Pcg, block_jacobi, "block-jacobi");
BENCHMARK_CAPTURE(BM_Pcg, mst, "mst");
BENCHMARK_CAPTURE(BM_Pcg, row_mst, "row-mst");
BENCHMARK_CAPTURE(BM_Pcg, aug_mst, "aug-mst");

}  // namespace

BENCHMARK_MAIN();
