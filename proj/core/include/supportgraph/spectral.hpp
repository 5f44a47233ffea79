#pragma once

// Desk-scale spectral checks of the support-graph condition number bounds.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "supportgraph/blockmat.hpp"
#include "supportgraph/dense.hpp"
#include "supportgraph/graph.hpp"
#include "supportgraph/precond.hpp"

namespace supportgraph {

/// Largest dense size accepted by the generalized eigensolver.
inline constexpr std::size_t kSpectralCapacity = 2048;

struct ExtremalEigs {
  double lambda_min = 0.0;
  double lambda_max = 0.0;
};

/// Extremal lambda with A x = lambda B x via B = R R^T and the eigenvalues of
/// R^{-1} A R^{-T}. Throws NotPositiveDefinite if B is not SPD.
ExtremalEigs generalized_extremal_eigs(const DenseMatrix& a, const DenseMatrix& b);
std::vector<double> generalized_eigenvalues(const DenseMatrix& a, const DenseMatrix& b);

/// sigma(A, B) = min { tau : tau B - A is PSD } for PSD A, B; +infinity when
/// the null space of B is not contained in that of A.
double support(const DenseMatrix& a, const DenseMatrix& b);

struct SpectralReport {
  std::string strategy;
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  double kappa_precond = 0.0;
  /// max over edges of cond(w(e))
  double kappa_edges = 0.0;
  /// kappa used in the bounds (kappa_edges unless overridden)
  double kappa = 0.0;
  std::size_t vertices = 0;
  std::size_t edges = 0;
  std::size_t max_degree = 0;
  std::size_t subtrees = 0;
  double bound_mst = 0.0;  // kappa m (n - 1)
  double bound_aug = 0.0;  // 2 kappa Delta^3 n^2 / t^2
  /// Whether a proven upper bound exists for this strategy.
  bool bound_applicable = false;
  bool bound_holds = false;
  /// Whether lambda_min >= 1 is guaranteed (subgraph preconditioners).
  bool lambda_min_guaranteed = false;
};

struct BoundOptions {
  std::optional<double> kappa;
};

/// Builds the preconditioner, computes its generalized extremal eigenvalues
/// against the Laplacian of g, and evaluates the bound for the strategy.
/// `subtrees` overrides the AugmentedMst subtree count when nonzero.
SpectralReport verify_bounds(const MatrixWeightedGraph& g, const Strategy& strategy,
                             std::size_t subtrees = 0, const BoundOptions& options = {});

/// max_i lambda_max(A B_i^{-1})
double congestion(const SymBlock& edge, const std::vector<SymBlock>& path);

/// The single-edge matrix and the path Laplacian (zero block row sums)
/// over k + 1 vertices.
DenseMatrix edge_laplacian(const SymBlock& edge, std::size_t k);
DenseMatrix path_laplacian(const std::vector<SymBlock>& path);

/// Whether factor * B_path - A_edge is PSD.
bool path_supports_edge(const SymBlock& edge, const std::vector<SymBlock>& path, double factor);

/// Whether k * congestion * B_path - A_edge is PSD.
bool congestion_dilation_check(const SymBlock& edge, const std::vector<SymBlock>& path);

}  // namespace supportgraph
