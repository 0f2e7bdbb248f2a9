#pragma once

#include <cstdint>

namespace topobus {

/// Deterministic counter-based generator (splitmix64 finalizer).
///
/// Every draw hashes (seed, counter), so sequences are identical on any
/// platform and substreams can be derived per measurement, which keeps
/// protocol traces replayable bit for bit. Not cryptographic.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t next_u64() { return mix(seed_ + kGamma * ++counter_); }

  /// Uniform double in [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Independent substream keyed by `stream`; does not advance this generator.
  Rng split(std::uint64_t stream) const {
    return Rng(mix(seed_ ^ mix(stream + kGamma)));
  }

 private:
  static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
};

}  // namespace topobus
