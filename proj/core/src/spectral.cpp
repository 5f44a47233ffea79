#include "supportgraph/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "supportgraph/errors.hpp"

namespace supportgraph {

namespace {

constexpr double kNullTol = 1e-10;
constexpr double kLoewnerTol = 1e-12;

/// Solves R Y = M for lower-triangular R, column by column.
DenseMatrix lower_solve(const DenseMatrix& r, const DenseMatrix& m) {
  const std::size_t n = r.size();
  DenseMatrix y(n);
  for (std::size_t c = 0; c < n; ++c)
    for (std::size_t i = 0; i < n; ++i) {
      double v = m(i, c);
      for (std::size_t k = 0; k < i; ++k) v -= r(i, k) * y(k, c);
      y(i, c) = v / r(i, i);
    }
  return y;
}

DenseMatrix block_to_dense(const SymBlock& s) {
  DenseMatrix m(s.dim());
  for (std::size_t i = 0; i < s.dim(); ++i)
    for (std::size_t j = 0; j < s.dim(); ++j) m(i, j) = s(i, j);
  return m;
}

void add_block(DenseMatrix& m, std::size_t bi, std::size_t bj, const SymBlock& s, double scale) {
  const std::size_t d = s.dim();
  for (std::size_t r = 0; r < d; ++r)
    for (std::size_t c = 0; c < d; ++c) m(bi * d + r, bj * d + c) += scale * s(r, c);
}

}  // namespace

std::vector<double> generalized_eigenvalues(const DenseMatrix& a, const DenseMatrix& b) {
  const std::size_t n = a.size();
  if (b.size() != n) throw InputError("generalized eigenvalues: size mismatch");
  if (n > kSpectralCapacity) throw CapacityExceeded("generalized eigenvalues: matrix too large");
  const DenseMatrix r = cholesky_lower(b);
  // C = R^{-1} A R^{-T} = R^{-1} (R^{-1} A)^T since A is symmetric.
  const DenseMatrix w = lower_solve(r, a);
  const DenseMatrix c = lower_solve(r, w.transposed());
  return dense_sym_eigen(c).values;
}

ExtremalEigs generalized_extremal_eigs(const DenseMatrix& a, const DenseMatrix& b) {
  const auto values = generalized_eigenvalues(a, b);
  if (values.empty()) return {};
  return {values.front(), values.back()};
}

double support(const DenseMatrix& a, const DenseMatrix& b) {
  const std::size_t n = a.size();
  if (b.size() != n) throw InputError("support: size mismatch");
  if (n == 0) return 0.0;
  const DenseEigen eb = dense_sym_eigen(b);
  const DenseEigen ea = dense_sym_eigen(a);
  const double bmax = std::max(std::abs(eb.values.front()), std::abs(eb.values.back()));
  const double amax = std::max(std::abs(ea.values.front()), std::abs(ea.values.back()));
  if (amax == 0.0) return 0.0;
  if (bmax == 0.0) return std::numeric_limits<double>::infinity();

  std::vector<std::size_t> range;
  std::vector<double> q(n);
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) q[i] = eb.vectors(i, k);
    if (eb.values[k] > kNullTol * bmax) {
      range.push_back(k);
      continue;
    }
    // Null vector of B: A must annihilate it too.
    const auto aq = a.multiply(q);
    double norm = 0.0;
    for (double v : aq) norm += v * v;
    if (std::sqrt(norm) > kNullTol * amax) return std::numeric_limits<double>::infinity();
  }

  // Restrict to range(B): C = L^{-1/2} Q_r^T A Q_r L^{-1/2}.
  const std::size_t m = range.size();
  DenseMatrix c(m);
  for (std::size_t x = 0; x < m; ++x) {
    for (std::size_t i = 0; i < n; ++i) q[i] = eb.vectors(i, range[x]);
    const auto aq = a.multiply(q);
    for (std::size_t y = 0; y < m; ++y) {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += eb.vectors(i, range[y]) * aq[i];
      c(y, x) = s / std::sqrt(eb.values[range[x]] * eb.values[range[y]]);
    }
  }
  return std::max(0.0, dense_sym_eigen(c).values.back());
}

SpectralReport verify_bounds(const MatrixWeightedGraph& g, const Strategy& strategy,
                             std::size_t subtrees, const BoundOptions& options) {
  Strategy s = strategy;
  if (s.kind == StrategyKind::AugmentedMst && subtrees != 0) s.subtrees = subtrees;
  const Preconditioner p = Preconditioner::build(s, g);

  const DenseMatrix gamma = assemble_dense(g);
  const DenseMatrix pm = p.matrix().to_dense();
  const ExtremalEigs eig = generalized_extremal_eigs(gamma, pm);

  SpectralReport rep;
  rep.strategy = s.token();
  rep.lambda_min = eig.lambda_min;
  rep.lambda_max = eig.lambda_max;
  rep.kappa_precond = eig.lambda_max / eig.lambda_min;
  for (const Edge& e : g.edges())
    rep.kappa_edges = std::max(rep.kappa_edges, condition_number(e.weight));
  rep.kappa = options.kappa.value_or(rep.kappa_edges);
  rep.vertices = g.vertex_count();
  rep.edges = g.edge_count();
  rep.max_degree = g.max_degree();
  rep.subtrees = p.subtrees_used();

  const double n = static_cast<double>(rep.vertices);
  const double m = static_cast<double>(rep.edges);
  const double delta = static_cast<double>(rep.max_degree);
  rep.bound_mst = rep.kappa * m * (n - 1.0);
  if (rep.subtrees > 0) {
    const double t = static_cast<double>(rep.subtrees);
    rep.bound_aug = 2.0 * rep.kappa * delta * delta * delta * n * n / (t * t);
  }

  rep.lambda_min_guaranteed = s.is_subgraph();
  switch (s.kind) {
    case StrategyKind::Mst:
      rep.bound_applicable = true;
      rep.bound_holds = rep.lambda_max <= rep.bound_mst;
      break;
    case StrategyKind::AugmentedMst:
      rep.bound_applicable = true;
      rep.bound_holds = rep.lambda_max <= rep.bound_aug;
      break;
    default:
      rep.bound_applicable = false;
      rep.bound_holds = false;
      break;
  }
  return rep;
}

double congestion(const SymBlock& edge, const std::vector<SymBlock>& path) {
  double worst = 0.0;
  const DenseMatrix a = block_to_dense(edge);
  for (const SymBlock& b : path)
    worst = std::max(worst, generalized_extremal_eigs(a, block_to_dense(b)).lambda_max);
  return worst;
}

DenseMatrix edge_laplacian(const SymBlock& edge, std::size_t k) {
  DenseMatrix m((k + 1) * edge.dim());
  add_block(m, 0, 0, edge, 1.0);
  add_block(m, k, k, edge, 1.0);
  add_block(m, 0, k, edge, -1.0);
  add_block(m, k, 0, edge, -1.0);
  return m;
}

DenseMatrix path_laplacian(const std::vector<SymBlock>& path) {
  if (path.empty()) throw InputError("path_laplacian: empty path");
  const std::size_t k = path.size();
  DenseMatrix m((k + 1) * path.front().dim());
  for (std::size_t i = 0; i < k; ++i) {
    add_block(m, i, i, path[i], 1.0);
    add_block(m, i + 1, i + 1, path[i], 1.0);
    add_block(m, i, i + 1, path[i], -1.0);
    add_block(m, i + 1, i, path[i], -1.0);
  }
  return m;
}

bool path_supports_edge(const SymBlock& edge, const std::vector<SymBlock>& path, double factor) {
  DenseMatrix diff = path_laplacian(path);
  diff *= factor;
  diff -= edge_laplacian(edge, path.size());
  return is_psd(diff, kLoewnerTol);
}

bool congestion_dilation_check(const SymBlock& edge, const std::vector<SymBlock>& path) {
  const double k = static_cast<double>(path.size());
  return path_supports_edge(edge, path, k * congestion(edge, path));
}

}  // namespace supportgraph
