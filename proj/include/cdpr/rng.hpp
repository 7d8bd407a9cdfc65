#pragma once

#include <cstdint>
#include <random>

#include "cdpr/types.hpp"

namespace cdpr {

/// Named random streams. Each purpose draws from its own seed so adding
/// draws to one stream never shifts another.
enum class Stream : std::uint64_t {
  kSampling = 1,
  kSignal = 2,
  kSupport = 3,
  kNoise = 4,
  kInit = 5,
  kIndex = 6,
  kSymbols = 7,
  kChannelNoise = 8,
};

std::uint64_t splitmix64(std::uint64_t x);

/// Seed for (base, trial, purpose). Pure function of its arguments.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t trial, Stream purpose);
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t trial);

/// mt19937_64 with distribution transforms written out so that draws are
/// bit-identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }
  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  // Uniform integer in [0, n), unbiased.
  std::uint64_t below(std::uint64_t n);
  double normal();
  // Circularly symmetric CN(0, 1): real and imaginary parts ~ N(0, 1/2).
  cplx complex_normal();

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace cdpr
