#include "supportgraph/krylov.hpp"

#include <chrono>
#include <cmath>

#include "supportgraph/errors.hpp"

namespace supportgraph {

LinearOperator graph_operator(const MatrixWeightedGraph& g) {
  return [&g](const BlockVector& in, BlockVector& out) { laplacian_matvec(g, in, out); };
}

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Converged: return "converged";
    case SolveStatus::MaxIterations: return "max-iterations";
  }
  return "?";
}

PcgResult pcg(const LinearOperator& a, const BlockVector& b, const LinearOperator& m_inverse,
              const PcgOptions& options) {
  if (!(options.tol > 0.0)) throw InputError("pcg: tolerance must be positive");
  if (options.reference && !options.reference->same_shape(b))
    throw InputError("pcg: reference has wrong shape");
  const auto start = std::chrono::steady_clock::now();
  const std::size_t max_iter = options.max_iter ? options.max_iter : 10 * b.blocks();

  PcgResult out{BlockVector(b.blocks(), b.dim()), {}};
  BlockVector& x = out.x;
  ConvergenceRecord& rec = out.record;

  const double bnorm = norm2(b);
  const double xref_norm = options.reference ? norm2(*options.reference) : 0.0;
  const auto record_error = [&] {
    if (!options.reference) return;
    const double e = norm2(x - *options.reference);
    rec.error_history.push_back(xref_norm > 0.0 ? e / xref_norm : e);
  };
  const auto true_residual = [&] {
    BlockVector ax(b.blocks(), b.dim());
    a(x, ax);
    const double r = norm2(b - ax);
    return bnorm > 0.0 ? r / bnorm : r;
  };
  const auto finish = [&] {
    rec.final_true_residual = true_residual();
    rec.true_residual_checks.emplace_back(rec.iterations, rec.final_true_residual);
    rec.wall_time =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  };

  if (bnorm == 0.0) {
    rec.residual_history.push_back(0.0);
    record_error();
    rec.status = SolveStatus::Converged;
    finish();
    return out;
  }

  BlockVector r = b;
  BlockVector z(b.blocks(), b.dim());
  m_inverse(r, z);
  BlockVector p = z;
  BlockVector q(b.blocks(), b.dim());
  double rz = dot(r, z);

  rec.residual_history.push_back(1.0);
  record_error();
  if (options.observer) options.observer(0, x, r, z);

  for (std::size_t k = 1; k <= max_iter; ++k) {
    a(p, q);
    const double pq = dot(p, q);
    if (std::isnan(pq) || std::isnan(rz)) throw NumericalBreakdown(k);
    if (!(pq > 0.0)) throw NotPositiveDefiniteOperator(k);
    const double alpha = rz / pq;
    axpy(alpha, p, x);
    axpy(-alpha, q, r);
    rec.iterations = k;

    const double rel = norm2(r) / bnorm;
    if (!std::isfinite(rel)) throw NumericalBreakdown(k);
    rec.residual_history.push_back(rel);
    record_error();
    if (options.true_residual_interval && k % options.true_residual_interval == 0)
      rec.true_residual_checks.emplace_back(k, true_residual());

    m_inverse(r, z);
    if (options.observer) options.observer(k, x, r, z);
    if (rel <= options.tol) {
      rec.status = SolveStatus::Converged;
      break;
    }

    const double rz_next = dot(r, z);
    if (!std::isfinite(rz_next)) throw NumericalBreakdown(k);
    const double beta = rz_next / rz;
    rz = rz_next;
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = z[i] + beta * p[i];
  }
  finish();
  return out;
}

PcgResult pcg(const LinearOperator& a, const BlockVector& b, const Preconditioner& m,
              const PcgOptions& options) {
  const LinearOperator m_inverse = [&m](const BlockVector& in, BlockVector& out) {
    out = m.apply(in);
  };
  PcgResult res = pcg(a, b, m_inverse, options);
  res.record.strategy = m.strategy().token();
  return res;
}

}  // namespace supportgraph
