#include "dnls/random.hpp"

#include <cmath>
#include <numbers>

namespace dnls {

LatticeField random_field_in_ball(Rng &rng, int T, int K, double radius) {
  LatticeField phi(T, K);
  for (std::size_t i = 0; i < phi.size(); ++i) {
    const double rho = radius * std::sqrt(rng.uniform());
    phi[i] = std::polar(rho, 2.0 * std::numbers::pi * rng.uniform());
  }
  return phi;
}

LatticeField random_field_on_sphere(Rng &rng, int T, int K, double radius) {
  LatticeField phi(T, K);
  for (std::size_t i = 0; i < phi.size(); ++i)
    phi[i] = std::polar(radius * rng.uniform(),
                        2.0 * std::numbers::pi * rng.uniform());
  const auto j = rng.below(phi.size());
  phi[j] = std::polar(radius, 2.0 * std::numbers::pi * rng.uniform());
  return phi;
}

} // namespace dnls
