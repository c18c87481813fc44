#pragma once

#include <cstdint>

namespace bsb {

// One splitmix64 step; also the seed-expansion primitive.
std::uint64_t splitmix64(std::uint64_t& state);

// Derives an independent stream seed from a master seed. Used to give each
// subject / stage its own generator so parallel generation stays
// schedule-independent.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

// xoshiro256** with hand-rolled variate transforms. The standard library
// distributions are implementation-defined, which would break the
// bit-identical corpus contract; everything here is pinned arithmetic.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64();

  // [0, 1), 53-bit resolution
  double uniform();
  // [lo, hi)
  double uniform(double lo, double hi);
  // inclusive bounds
  int uniform_int(int lo, int hi);
  // standard normal (Marsaglia polar)
  double normal();
  // Poisson via Knuth multiplication; large means split into exact
  // Poisson(a)+Poisson(b) chunks.
  int poisson(double mean);

 private:
  std::uint64_t s_[4];
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace bsb
