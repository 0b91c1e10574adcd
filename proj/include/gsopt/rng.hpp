#pragma once

#include <cstdint>

namespace gsopt::rng {

// Derives an independent stream seed from a base seed. Two splitmix64 rounds;
// mix(seed, a) and mix(seed, b) are uncorrelated streams for a != b.
std::uint64_t mix(std::uint64_t seed, std::uint64_t stream);

// Deterministic random source. All distributions are implemented here
// explicitly (not via std:: distributions) so that a given seed produces
// the same byte stream on every standard library / platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64();

  // Uniform on (0, 1).
  double uniform01();

  // Standard normal, Box-Muller with cached spare.
  double gaussian();

  // Laplace with scale 1/sqrt(2) -> unit variance.
  double laplace_unit();

  // Uniform on [-sqrt(3), sqrt(3)] -> unit variance.
  double uniform_unit();

  // Uniform integer in [lo, hi], bias-free.
  int uniform_int(int lo, int hi);

 private:
  std::uint64_t state_[4];  // xoshiro256++
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace gsopt::rng
