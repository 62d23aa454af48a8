#include "divisim/random.hpp"

#include <cmath>

namespace divisim {

std::uint64_t mixSeed(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Rng::Rng(std::uint64_t seed) : engine_(mixSeed(seed)) {}

Rng Rng::derive(std::uint64_t seed, std::uint64_t stream) {
  return Rng(mixSeed(seed) ^ mixSeed(stream + 0x632be59bd9b4e019ULL));
}

Rng Rng::derive(std::uint64_t seed, std::uint64_t stream, std::uint64_t substream) {
  return derive(mixSeed(seed) ^ mixSeed(stream), substream);
}

double Rng::uniform() {
  for (;;) {
    // 53 random mantissa bits.
    const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    if (u > 0.0) return u;
  }
}

double Rng::normal() {
  // Marsaglia polar method, one value per accepted pair (no cached state so
  // copies of an Rng stay interchangeable).
  for (;;) {
    const double a = 2.0 * uniform() - 1.0;
    const double b = 2.0 * uniform() - 1.0;
    const double r2 = a * a + b * b;
    if (r2 > 0.0 && r2 < 1.0) return a * std::sqrt(-2.0 * std::log(r2) / r2);
  }
}

}  // namespace divisim
