#pragma once

// Counter-based SplitMix64 stream. Draw i (0-based) of a stream with seed s
// is mix(s + (i + 1) * 0x9E3779B97F4A7C15), where mix is the SplitMix64
// finalizer. Uniforms use the top 53 bits; normals use the cosine branch of
// Box-Muller and consume two draws each.

#include <cstdint>

namespace ftopt::harness {

class SplitMix64Stream {
 public:
  explicit SplitMix64Stream(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t next_u64();
  /// In [0, 1).
  double uniform();
  double normal();

  std::uint64_t draws() const { return counter_; }

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
};

std::uint64_t splitmix64_mix(std::uint64_t z);

}  // namespace ftopt::harness
