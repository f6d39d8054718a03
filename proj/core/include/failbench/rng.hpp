#pragma once

#include <cstdint>
#include <random>

namespace failbench {

/// Seedable generator with a portable output stream.
///
/// The engine is std::mt19937_64, whose bit stream is fixed by the C++
/// standard. The standard distributions are implementation-defined, so
/// doubles are derived here directly from the engine output:
///   uniform()  = (x >> 11) * 2^-53, in [0, 1)
///   normal()   = Box-Muller on two uniforms (cached second draw is discarded)
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }
  double uniform();
  double normal();

  /// Independent stream for the given seed and purpose tag (splitmix64).
  static std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

 private:
  std::mt19937_64 engine_;
};

}  // namespace failbench
