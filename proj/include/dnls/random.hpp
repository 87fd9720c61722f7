#pragma once

#include <cstdint>
#include <random>

#include "dnls/lattice.hpp"

namespace dnls {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed for the independent substream `stream` of a master seed.
inline std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x51ed27f1ULL));
}

/// mt19937_64 with library-independent conversions, so that sampled
/// quantities are reproducible across standard library implementations.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  std::uint64_t below(std::uint64_t n) { return engine_() % n; }

private:
  std::mt19937_64 engine_;
};

/// Field whose entries are uniform in the complex disk of the given radius.
LatticeField random_field_in_ball(Rng &rng, int T, int K, double radius);

/// Field on the sup-norm sphere: moduli uniform on [0, radius], phases
/// uniform, and one uniformly chosen entry rescaled to modulus exactly radius.
LatticeField random_field_on_sphere(Rng &rng, int T, int K, double radius);

} // namespace dnls
