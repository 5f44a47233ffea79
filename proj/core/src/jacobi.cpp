#include "supportgraph/detail/jacobi.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace supportgraph::detail {

namespace {

double off_diagonal_norm(const std::vector<double>& a, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) s += a[i * n + j] * a[i * n + j];
  return std::sqrt(s);
}

}  // namespace

void jacobi_eigen(std::vector<double>& a, std::size_t n, std::vector<double>& v,
                  double rel_tol, int max_sweeps) {
  v.assign(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) v[i * n + i] = 1.0;

  double total = 0.0;
  for (double x : a) total += x * x;
  total = std::sqrt(total);
  if (total == 0.0) return;
  const double threshold = rel_tol * total;

  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    if (off_diagonal_norm(a, n) <= threshold) return;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a[p * n + q];
        if (apq == 0.0) continue;
        const double app = a[p * n + p];
        const double aqq = a[q * n + q];
        const double tau = (aqq - app) / (2.0 * apq);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;

        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a[k * n + p];
          const double akq = a[k * n + q];
          a[k * n + p] = c * akp - s * akq;
          a[k * n + q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a[p * n + k];
          const double aqk = a[q * n + k];
          a[p * n + k] = c * apk - s * aqk;
          a[q * n + k] = s * apk + c * aqk;
        }
        a[p * n + q] = 0.0;
        a[q * n + p] = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v[k * n + p];
          const double vkq = v[k * n + q];
          v[k * n + p] = c * vkp - s * vkq;
          v[k * n + q] = s * vkp + c * vkq;
        }
      }
    }
  }
}

std::vector<double> sort_eigenpairs(const std::vector<double>& a, std::size_t n,
                                    std::vector<double>& v) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t x, std::size_t y) {
    return a[x * n + x] < a[y * n + y];
  });
  std::vector<double> values(n);
  std::vector<double> sorted(n * n);
  for (std::size_t k = 0; k < n; ++k) {
    values[k] = a[idx[k] * n + idx[k]];
    for (std::size_t r = 0; r < n; ++r) sorted[r * n + k] = v[r * n + idx[k]];
  }
  v = std::move(sorted);
  return values;
}

}  // namespace supportgraph::detail
