#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "supportgraph/block_vector.hpp"
#include "supportgraph/graph.hpp"
#include "supportgraph/precond.hpp"

namespace supportgraph {

/// out = A in
using LinearOperator = std::function<void(const BlockVector& in, BlockVector& out)>;

/// Matrix-free block Laplacian of g.
LinearOperator graph_operator(const MatrixWeightedGraph& g);

enum class SolveStatus { Converged, MaxIterations };

const char* to_string(SolveStatus s);

struct ConvergenceRecord {
  std::size_t iterations = 0;
  /// ||r_k|| / ||b|| from the recurrence; entry 0 is the initial residual.
  std::vector<double> residual_history;
  /// ||x_k - x*|| / ||x*||; empty without a reference solution.
  std::vector<double> error_history;
  /// (iteration, ||b - A x_k|| / ||b||) recomputed periodically and at the end.
  std::vector<std::pair<std::size_t, double>> true_residual_checks;
  double final_true_residual = 0.0;
  double wall_time = 0.0;  // seconds
  SolveStatus status = SolveStatus::MaxIterations;
  std::string strategy;
  std::uint64_t seed = 0;
  std::string scenario;
};

struct PcgOptions {
  double tol = 1e-8;
  /// 0 means 10 * (number of blocks).
  std::size_t max_iter = 0;
  const BlockVector* reference = nullptr;
  std::size_t true_residual_interval = 50;
  /// Called with (k, x_k, r_k, z_k) for k = 0, 1, ...
  std::function<void(std::size_t, const BlockVector&, const BlockVector&, const BlockVector&)>
      observer;
};

struct PcgResult {
  BlockVector x;
  ConvergenceRecord record;
};

/// Left-preconditioned conjugate gradient from x0 = 0. `m_inverse` applies
/// the preconditioner inverse. Throws NotPositiveDefiniteOperator when
/// p^T A p <= 0 and NumericalBreakdown on NaN.
PcgResult pcg(const LinearOperator& a, const BlockVector& b, const LinearOperator& m_inverse,
              const PcgOptions& options = {});

PcgResult pcg(const LinearOperator& a, const BlockVector& b, const Preconditioner& m,
              const PcgOptions& options = {});

}  // namespace supportgraph
