#pragma once

#include <cstdint>

#include "seqkrylov/types.hpp"

namespace seqkrylov {

/// Deterministic pseudo-random generator (splitmix64). All randomness in the
/// library flows through this type so that a single 64-bit seed reproduces
/// every generated sequence, vector, and probe bit-for-bit across runs.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Integer in [0, n).
  std::uint64_t below(std::uint64_t n) { return next_u64() % n; }

  double normal();

  Vector normal_vector(Index n);

  /// Normal vector scaled to unit 2-norm.
  Vector unit_vector(Index n);

 private:
  std::uint64_t state_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace seqkrylov
