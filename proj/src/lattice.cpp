#include "dnls/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dnls/potential.hpp"

namespace dnls {

void LatticeParams::validate() const {
  if (T < 1)
    throw InvalidParams("T must be >= 1, got " + std::to_string(T));
  if (K < 2)
    throw InvalidParams("K must be >= 2, got " + std::to_string(K));
  if (!(beta > 0.0) || !std::isfinite(beta))
    throw InvalidParams("beta must be a positive finite number");
  if (!(epsilon > 0.0) || !std::isfinite(epsilon))
    throw InvalidParams("epsilon must be a positive finite number");
  if (gamma == 0.0 || !std::isfinite(gamma))
    throw InvalidParams("gamma must be a nonzero finite number");
}

LatticeField::LatticeField(int T, int K)
    : T_(T), K_(K), values_(static_cast<std::size_t>(T) * K) {
  if (T < 1 || K < 1)
    throw InvalidParams("lattice periods must be positive");
}

LatticeField::LatticeField(int T, int K, std::vector<cplx> values)
    : T_(T), K_(K), values_(std::move(values)) {
  if (T < 1 || K < 1)
    throw InvalidParams("lattice periods must be positive");
  if (values_.size() != static_cast<std::size_t>(T) * K)
    throw DimensionMismatch("field has " + std::to_string(values_.size()) +
                            " values, expected T*K = " +
                            std::to_string(static_cast<long>(T) * K));
}

LatticeField LatticeField::constant(int T, int K, cplx value) {
  return {T, K, std::vector<cplx>(static_cast<std::size_t>(T) * K, value)};
}

LatticeField &LatticeField::operator+=(const LatticeField &o) {
  if (!same_shape(o))
    throw DimensionMismatch("field shapes differ");
  for (std::size_t i = 0; i < values_.size(); ++i)
    values_[i] += o.values_[i];
  return *this;
}

LatticeField &LatticeField::operator-=(const LatticeField &o) {
  if (!same_shape(o))
    throw DimensionMismatch("field shapes differ");
  for (std::size_t i = 0; i < values_.size(); ++i)
    values_[i] -= o.values_[i];
  return *this;
}

LatticeField &LatticeField::operator*=(cplx a) {
  for (auto &v : values_)
    v *= a;
  return *this;
}

LatticeField operator+(LatticeField a, const LatticeField &b) { return a += b; }
LatticeField operator-(LatticeField a, const LatticeField &b) { return a -= b; }
LatticeField operator-(LatticeField a) { return a *= -1.0; }
LatticeField operator*(cplx s, LatticeField a) { return a *= s; }

double sup_norm(const LatticeField &phi) {
  double m = 0.0;
  for (cplx v : phi.values())
    m = std::max(m, std::abs(v));
  return m;
}

double sup_distance(const LatticeField &a, const LatticeField &b) {
  if (!a.same_shape(b))
    throw DimensionMismatch("field shapes differ");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

LatticeField central_time_diff(const LatticeField &phi) {
  LatticeField out(phi.T(), phi.K());
  for (long t = 0; t < phi.T(); ++t)
    for (long k = 0; k < phi.K(); ++k)
      out(t, k) = phi(t + 1, k) - phi(t - 1, k);
  return out;
}

LatticeField spatial_laplacian(const LatticeField &phi) {
  LatticeField out(phi.T(), phi.K());
  for (long t = 0; t < phi.T(); ++t)
    for (long k = 0; k < phi.K(); ++k)
      out(t, k) = phi(t, k + 1) - 2.0 * phi(t, k) + phi(t, k - 1);
  return out;
}

LatticeField apply_L(const LatticeField &phi, const LatticeParams &params) {
  const cplx ib{0.0, params.beta};
  LatticeField out(phi.T(), phi.K());
  for (long t = 0; t < phi.T(); ++t)
    for (long k = 0; k < phi.K(); ++k)
      out(t, k) = ib * (phi(t + 1, k) - phi(t - 1, k)) +
                  params.epsilon *
                      (phi(t, k + 1) - 2.0 * phi(t, k) + phi(t, k - 1));
  return out;
}

LatticeField apply_F(const LatticeField &phi, const LatticeParams &params) {
  LatticeField out(phi.T(), phi.K());
  for (std::size_t i = 0; i < phi.size(); ++i)
    out[i] = -params.gamma * std::norm(phi[i]) * phi[i];
  return out;
}

LatticeField apply_G(const LatticeField &phi, const Potential &g) {
  if (!g.compatible_with(phi.T()))
    throw PeriodMismatch("potential period " + std::to_string(g.period()) +
                         " does not divide T = " + std::to_string(phi.T()));
  LatticeField out(phi.T(), phi.K());
  for (long t = 0; t < phi.T(); ++t)
    for (long k = 0; k < phi.K(); ++k)
      out(t, k) = g.evaluate(t, phi(t, k));
  return out;
}

} // namespace dnls
