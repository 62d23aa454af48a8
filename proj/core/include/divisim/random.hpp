#pragma once

#include <cstdint>
#include <random>

namespace divisim {

/// Seeded random state. Streams for parallel work are derived from a master
/// seed and a stream index, never from scheduling order.
class Rng {
 public:
  using Engine = std::mt19937_64;

  explicit Rng(std::uint64_t seed = 0);

  /// Independent stream keyed by (seed, stream).
  static Rng derive(std::uint64_t seed, std::uint64_t stream);
  static Rng derive(std::uint64_t seed, std::uint64_t stream, std::uint64_t substream);

  /// Uniform draw strictly inside (0, 1); boundary values are redrawn.
  double uniform();
  double normal();
  std::uint64_t next() { return engine_(); }

  Engine& engine() noexcept { return engine_; }

 private:
  Engine engine_;
};

/// splitmix64 finalizer, used for seed derivation.
std::uint64_t mixSeed(std::uint64_t x) noexcept;

}  // namespace divisim
