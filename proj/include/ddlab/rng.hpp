#pragma once

#include <Eigen/Core>

#include <cstdint>

namespace ddlab {

/// splitmix64: tiny deterministic generator, identical streams on every
/// platform (std distributions are implementation-defined).
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed) {}

  uint64_t next_u64() {
    uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// uniform in [0,1)
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// uniform in [-1,1)
  double next_symmetric() { return 2.0 * next_double() - 1.0; }

  Eigen::VectorXd vector(Eigen::Index n) {
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = next_symmetric();
    return v;
  }

 private:
  uint64_t state_;
};

}  // namespace ddlab
