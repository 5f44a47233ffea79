#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace supportgraph {

/// n blocks of length d stored contiguously.
class BlockVector {
 public:
  BlockVector() = default;
  BlockVector(std::size_t blocks, std::size_t dim, double value = 0.0)
      : dim_(dim), data_(blocks * dim, value) {}
  BlockVector(std::size_t dim, std::vector<double> data);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t blocks() const noexcept { return dim_ == 0 ? 0 : data_.size() / dim_; }
  std::size_t size() const noexcept { return data_.size(); }

  std::span<double> block(std::size_t i) { return {data_.data() + i * dim_, dim_}; }
  std::span<const double> block(std::size_t i) const {
    return {data_.data() + i * dim_, dim_};
  }
  double& operator[](std::size_t k) { return data_[k]; }
  double operator[](std::size_t k) const { return data_[k]; }
  std::span<double> values() noexcept { return data_; }
  std::span<const double> values() const noexcept { return data_; }
  const std::vector<double>& raw() const noexcept { return data_; }

  bool same_shape(const BlockVector& o) const {
    return dim_ == o.dim_ && data_.size() == o.data_.size();
  }
  void fill(double v);

  friend bool operator==(const BlockVector&, const BlockVector&) = default;

 private:
  std::size_t dim_ = 0;
  std::vector<double> data_;
};

double dot(const BlockVector& a, const BlockVector& b);
double norm2(const BlockVector& a);
/// y += alpha x
void axpy(double alpha, const BlockVector& x, BlockVector& y);
BlockVector operator-(const BlockVector& a, const BlockVector& b);
BlockVector operator+(const BlockVector& a, const BlockVector& b);
BlockVector operator*(double s, const BlockVector& a);

}  // namespace supportgraph
