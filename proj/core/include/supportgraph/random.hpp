#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace supportgraph {

/// SplitMix64 (Steele, Lea, Flood 2014). The state advances by the golden
/// gamma 0x9e3779b97f4a7c15 and each output is the state passed through the
/// mix function below. Fully specified so scenarios replay bit-for-bit in
/// any language:
///
///   z = (state += 0x9e3779b97f4a7c15)
///   z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9
///   z = (z ^ (z >> 27)) * 0x94d049bb133111eb
///   return z ^ (z >> 31)
///
/// uniform() takes the top 53 bits: (next() >> 11) * 2^-53, in [0, 1).
/// normal() is Box-Muller on two uniforms, u1 mapped to (0, 1]:
///   sqrt(-2 ln(1 - u1)) * cos(2 pi u2), then the sine branch is returned
///   on the following call.
/// split() seeds a child generator from next().
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

  SplitMix64 split() { return SplitMix64(next()); }

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace supportgraph
