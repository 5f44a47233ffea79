#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "supportgraph/errors.hpp"
#include "supportgraph/krylov.hpp"

using namespace supportgraph;

namespace {

BlockVector random_vector(SplitMix64& rng, std::size_t n, std::size_t d = 3) {
  BlockVector v(n, d);
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = rng.normal();
  return v;
}

MatrixWeightedGraph spd_graph(SplitMix64& rng, std::size_t n, double density = 0.1) {
  auto g = oracle::random_graph(rng, n, {.extra_edge_probability = density});
  std::vector<SymBlock> loops;
  for (std::size_t v = 0; v < n; ++v) loops.push_back(oracle::random_spd(rng, 3, 0.1) * 0.2);
  return g.with_self_loops(loops);
}

oracle::Matrix cholesky(const oracle::Matrix& a) {
  const std::size_t n = a.size();
  oracle::Matrix l = oracle::zeros(n);
  for (std::size_t j = 0; j < n; ++j) {
    double s = a[j][j];
    for (std::size_t k = 0; k < j; ++k) s -= l[j][k] * l[j][k];
    l[j][j] = std::sqrt(s);
    for (std::size_t i = j + 1; i < n; ++i) {
      double t = a[i][j];
      for (std::size_t k = 0; k < j; ++k) t -= l[i][k] * l[j][k];
      l[i][j] = t / l[j][j];
    }
  }
  return l;
}

std::vector<double> lower_solve(const oracle::Matrix& l, std::vector<double> b) {
  for (std::size_t i = 0; i < b.size(); ++i) {
    for (std::size_t k = 0; k < i; ++k) b[i] -= l[i][k] * b[k];
    b[i] /= l[i][i];
  }
  return b;
}

std::vector<double> upper_solve(const oracle::Matrix& l, std::vector<double> b) {
  for (std::size_t i = b.size(); i-- > 0;) {
    for (std::size_t k = i + 1; k < b.size(); ++k) b[i] -= l[k][i] * b[k];
    b[i] /= l[i][i];
  }
  return b;
}

double vdot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

// Plain CG on L^{-1} A L^{-T} y = L^{-1} b, mapped back with x = L^{-T} y.
std::vector<std::vector<double>> split_cg_iterates(const oracle::Matrix& a, const oracle::Matrix& m,
                                                   const std::vector<double>& b, std::size_t steps) {
  const oracle::Matrix l = cholesky(m);
  const auto op = [&](const std::vector<double>& y) {
    return lower_solve(l, oracle::matvec(a, upper_solve(l, y)));
  };
  std::vector<double> y(b.size(), 0.0), r = lower_solve(l, b), p = r;
  std::vector<std::vector<double>> xs = {upper_solve(l, y)};
  double rr = vdot(r, r);
  for (std::size_t k = 0; k < steps; ++k) {
    const auto ap = op(p);
    const double alpha = rr / vdot(p, ap);
    for (std::size_t t = 0; t < y.size(); ++t) {
      y[t] += alpha * p[t];
      r[t] -= alpha * ap[t];
    }
    const double rr_new = vdot(r, r);
    for (std::size_t t = 0; t < y.size(); ++t) p[t] = r[t] + (rr_new / rr) * p[t];
    rr = rr_new;
    xs.push_back(upper_solve(l, y));
  }
  return xs;
}

oracle::Matrix to_oracle(const DenseMatrix& d) {
  oracle::Matrix m = oracle::zeros(d.size());
  for (std::size_t i = 0; i < d.size(); ++i)
    for (std::size_t j = 0; j < d.size(); ++j) m[i][j] = d(i, j);
  return m;
}

}  // namespace

TEST_SUITE("krylov") {
  TEST_CASE("identity system converges in one step") {
    const MatrixWeightedGraph g(3, std::vector<SymBlock>(4, SymBlock::identity(3)), {});
    SplitMix64 rng(1);
    const BlockVector b = random_vector(rng, 4);
    const auto res = pcg(graph_operator(g), b, Preconditioner::build(Strategy::parse("identity"), g));
    CHECK(res.record.iterations == 1);
    CHECK(res.record.status == SolveStatus::Converged);
    CHECK(norm2(res.x - b) <= 1e-14 * norm2(b));
  }

  TEST_CASE("solution matches a dense direct solve") {
    SplitMix64 rng(2);
    const auto g = spd_graph(rng, 100, 0.04);
    const BlockVector b = random_vector(rng, 100);
    const auto want = oracle::gauss_solve(oracle::laplacian(g), b.raw());
    const BlockVector ref(3, want);
    for (const char* tok : {"identity", "jacobi", "block-jacobi", "mst", "row-mst", "aug-mst"}) {
      CAPTURE(tok);
      const auto p = Preconditioner::build(Strategy::parse(tok), g);
      const auto res = pcg(graph_operator(g), b, p, {.tol = 1e-12, .max_iter = 5000});
      CHECK(res.record.status == SolveStatus::Converged);
      CHECK(norm2(res.x - ref) <= 1e-8 * norm2(ref));
      CHECK(res.record.final_true_residual <= 1e-10);
    }
  }

  TEST_CASE("energy norm of the error never increases") {
    SplitMix64 rng(3);
    const auto g = spd_graph(rng, 60);
    const BlockVector b = random_vector(rng, 60);
    const BlockVector ref(3, oracle::gauss_solve(oracle::laplacian(g), b.raw()));
    for (const char* tok : {"identity", "mst", "row-mst"}) {
      CAPTURE(tok);
      std::vector<double> energy;
      PcgOptions opt{.tol = 1e-10};
      opt.observer = [&](std::size_t, const BlockVector& x, const BlockVector&, const BlockVector&) {
        const BlockVector e = x - ref;
        energy.push_back(dot(e, laplacian_matvec(g, e)));
      };
      pcg(graph_operator(g), b, Preconditioner::build(Strategy::parse(tok), g), opt);
      REQUIRE(energy.size() > 2);
      for (std::size_t k = 1; k < energy.size(); ++k) CHECK(energy[k] <= energy[k - 1] * (1 + 1e-10) + 1e-20);
    }
  }

  TEST_CASE("left preconditioning reproduces split preconditioning") {
    SplitMix64 rng(4);
    const auto g = spd_graph(rng, 40, 0.15);
    const BlockVector b = random_vector(rng, 40);
    for (const char* tok : {"block-jacobi", "mst", "aug-mst:3"}) {
      CAPTURE(tok);
      const auto p = Preconditioner::build(Strategy::parse(tok), g);
      std::vector<BlockVector> xs;
      PcgOptions opt{.tol = 1e-300, .max_iter = 20};
      opt.observer = [&](std::size_t, const BlockVector& x, const BlockVector&, const BlockVector&) {
        xs.push_back(x);
      };
      pcg(graph_operator(g), b, p, opt);
      const auto want = split_cg_iterates(oracle::laplacian(g), to_oracle(p.matrix().to_dense()), b.raw(), 20);
      REQUIRE(xs.size() >= 21);
      for (std::size_t k = 1; k <= 20; ++k) {
        const BlockVector w(3, want[k]);
        CHECK(norm2(xs[k] - w) <= 1e-8 * norm2(w));
      }
    }
  }

  TEST_CASE("records are deterministic") {
    SplitMix64 rng(5);
    const auto g = spd_graph(rng, 50);
    const BlockVector b = random_vector(rng, 50);
    const auto p = Preconditioner::build(Strategy::parse("mst"), g);
    const auto r1 = pcg(graph_operator(g), b, p), r2 = pcg(graph_operator(g), b, p);
    CHECK(r1.record.residual_history == r2.record.residual_history);
    CHECK(r1.x == r2.x);
  }

  TEST_CASE("residual history and reference errors") {
    SplitMix64 rng(6);
    const auto g = spd_graph(rng, 30);
    const BlockVector b = random_vector(rng, 30);
    const BlockVector ref(3, oracle::gauss_solve(oracle::laplacian(g), b.raw()));
    const auto res = pcg(graph_operator(g), b, Preconditioner::build(Strategy::parse("jacobi"), g),
                         {.tol = 1e-9, .reference = &ref});
    CHECK(res.record.residual_history.front() == 1.0);
    CHECK(res.record.residual_history.size() == res.record.iterations + 1);
    CHECK(res.record.error_history.size() == res.record.iterations + 1);
    CHECK(res.record.error_history.front() == doctest::Approx(1.0));
    CHECK(res.record.residual_history.back() <= 1e-9);
    CHECK_FALSE(res.record.true_residual_checks.empty());
  }

  TEST_CASE("iteration cap") {
    SplitMix64 rng(7);
    const auto g = spd_graph(rng, 80, 0.1);
    const BlockVector b = random_vector(rng, 80);
    const auto res = pcg(graph_operator(g), b, Preconditioner::build(Strategy::parse("identity"), g),
                         {.tol = 1e-14, .max_iter = 3});
    CHECK(res.record.iterations == 3);
    CHECK(res.record.status == SolveStatus::MaxIterations);
  }

  TEST_CASE("zero right-hand side") {
    SplitMix64 rng(8);
    const auto g = spd_graph(rng, 10);
    const auto res = pcg(graph_operator(g), BlockVector(10, 3), Preconditioner::build(Strategy::parse("mst"), g));
    CHECK(res.record.iterations == 0);
    CHECK(res.record.status == SolveStatus::Converged);
    CHECK(norm2(res.x) == 0.0);
  }

  TEST_CASE("indefinite operator and bad shapes") {
    const LinearOperator neg = [](const BlockVector& in, BlockVector& out) { out = -1.0 * in; };
    const LinearOperator id = [](const BlockVector& in, BlockVector& out) { out = in; };
    CHECK_THROWS_AS(pcg(neg, BlockVector(2, 3, 1.0), id), NotPositiveDefiniteOperator);
    const LinearOperator nan = [](const BlockVector& in, BlockVector& out) { out = in; out[0] = std::nan(""); };
    CHECK_THROWS_AS(pcg(nan, BlockVector(2, 3, 1.0), id), NumericalBreakdown);
    SplitMix64 rng(9);
    const auto g = spd_graph(rng, 5);
    CHECK_THROWS_AS(pcg(graph_operator(g), BlockVector(4, 3, 1.0), Preconditioner::build(Strategy::parse("mst"), g)),
                    InputError);
  }
}
