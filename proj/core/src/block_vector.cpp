#include "supportgraph/block_vector.hpp"

#include <algorithm>
#include <cmath>

#include "supportgraph/errors.hpp"

namespace supportgraph {

BlockVector::BlockVector(std::size_t dim, std::vector<double> data)
    : dim_(dim), data_(std::move(data)) {
  if (dim_ == 0 || data_.size() % dim_ != 0)
    throw InputError("block vector length is not a multiple of the block size");
}

void BlockVector::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

namespace {
void check_shape(const BlockVector& a, const BlockVector& b) {
  if (!a.same_shape(b)) throw InputError("block vector shape mismatch");
}
}  // namespace

double dot(const BlockVector& a, const BlockVector& b) {
  check_shape(a, b);
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

double norm2(const BlockVector& a) { return std::sqrt(dot(a, a)); }

void axpy(double alpha, const BlockVector& x, BlockVector& y) {
  check_shape(x, y);
  for (std::size_t k = 0; k < x.size(); ++k) y[k] += alpha * x[k];
}

BlockVector operator-(const BlockVector& a, const BlockVector& b) {
  BlockVector c = a;
  axpy(-1.0, b, c);
  return c;
}

BlockVector operator+(const BlockVector& a, const BlockVector& b) {
  BlockVector c = a;
  axpy(1.0, b, c);
  return c;
}

BlockVector operator*(double s, const BlockVector& a) {
  BlockVector c = a;
  for (double& x : c.values()) x *= s;
  return c;
}

}  // namespace supportgraph
