#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include "dnls/lattice.hpp"
#include "dnls/potential.hpp"
#include "dnls/random.hpp"

namespace testing {

using dnls::cplx;
using dnls::LatticeField;

inline LatticeField random_field(dnls::Rng &rng, int T, int K,
                                 double scale = 1.0) {
  LatticeField phi(T, K);
  for (std::size_t i = 0; i < phi.size(); ++i)
    phi[i] = {rng.uniform(-scale, scale), rng.uniform(-scale, scale)};
  return phi;
}

inline cplx random_complex(dnls::Rng &rng, double scale = 1.0) {
  return {rng.uniform(-scale, scale), rng.uniform(-scale, scale)};
}

inline long mod(long i, long n) { return ((i % n) + n) % n; }

// Entry (t,k) read through explicit modular arithmetic on the flat buffer.
inline cplx at(const LatticeField &phi, long t, long k) {
  return phi[static_cast<std::size_t>(mod(t, phi.T()) * phi.K() +
                                      mod(k, phi.K()))];
}

inline LatticeField naive_L(const LatticeField &phi, double beta,
                            double epsilon) {
  const cplx i{0.0, 1.0};
  LatticeField out(phi.T(), phi.K());
  for (long t = 0; t < phi.T(); ++t)
    for (long k = 0; k < phi.K(); ++k)
      out[t * phi.K() + k] =
          i * beta * (at(phi, t + 1, k) - at(phi, t - 1, k)) +
          epsilon * (at(phi, t, k + 1) - 2.0 * at(phi, t, k) +
                     at(phi, t, k - 1));
  return out;
}

// Pointwise residual of the lattice equation, written from the formula.
inline double naive_residual(const LatticeField &phi, double beta,
                             double epsilon, double gamma,
                             const dnls::Potential &g) {
  const cplx i{0.0, 1.0};
  double worst = 0.0;
  for (long t = 0; t < phi.T(); ++t)
    for (long k = 0; k < phi.K(); ++k) {
      const cplx u = at(phi, t, k);
      const cplx lhs = i * beta * (at(phi, t + 1, k) - at(phi, t - 1, k)) +
                       gamma * std::abs(u) * std::abs(u) * u +
                       epsilon * (at(phi, t, k + 1) - 2.0 * u +
                                  at(phi, t, k - 1));
      worst = std::max(worst, std::abs(lhs - g.evaluate(t, u)));
    }
  return worst;
}

inline double max_entry_diff(const LatticeField &a, const LatticeField &b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

inline double brute_max_modulus(const LatticeField &phi) {
  double m = 0.0;
  for (std::size_t i = 0; i < phi.size(); ++i)
    m = std::max(m, std::hypot(phi[i].real(), phi[i].imag()));
  return m;
}

} // namespace testing
