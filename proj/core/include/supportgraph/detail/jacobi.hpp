#pragma once

#include <cstddef>
#include <vector>

namespace supportgraph::detail {

/// Cyclic Jacobi on a row-major symmetric n x n buffer. On return `a` holds
/// the (unsorted) eigenvalues on its diagonal and `v` the eigenvectors as
/// columns. Sweeps until the off-diagonal Frobenius mass drops below
/// `rel_tol` times the Frobenius norm of the input.
void jacobi_eigen(std::vector<double>& a, std::size_t n, std::vector<double>& v,
                  double rel_tol = 1e-14, int max_sweeps = 100);

/// Sorts the eigenpairs produced by jacobi_eigen ascending. Returns the
/// eigenvalues; `v` is permuted in place.
std::vector<double> sort_eigenpairs(const std::vector<double>& a, std::size_t n,
                                    std::vector<double>& v);

}  // namespace supportgraph::detail
