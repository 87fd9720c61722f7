#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "dnls/error.hpp"

namespace dnls {

using cplx = std::complex<double>;

class Potential;

/// Lattice periods and equation coefficients.
struct LatticeParams {
  int T = 1;
  int K = 2;
  double beta = 1.0;
  double epsilon = 1.0;
  double gamma = 1.0;

  /// Throws InvalidParams unless T >= 1, K >= 2, beta > 0, epsilon > 0 and
  /// gamma != 0.
  void validate() const;

  std::size_t size() const { return static_cast<std::size_t>(T) * K; }
};

/// A (T,K)-periodic complex lattice function, stored row-major with flat
/// index t*K + k over one fundamental period.
class LatticeField {
public:
  LatticeField() = default;
  LatticeField(int T, int K);
  LatticeField(int T, int K, std::vector<cplx> values);

  static LatticeField zeros(const LatticeParams &p) { return {p.T, p.K}; }
  static LatticeField constant(int T, int K, cplx value);

  int T() const { return T_; }
  int K() const { return K_; }
  std::size_t size() const { return values_.size(); }

  /// Periodic access: any integer (t, k) is reduced modulo (T, K).
  cplx operator()(long t, long k) const { return values_[index(t, k)]; }
  cplx &operator()(long t, long k) { return values_[index(t, k)]; }

  cplx operator[](std::size_t i) const { return values_[i]; }
  cplx &operator[](std::size_t i) { return values_[i]; }

  std::span<const cplx> values() const { return values_; }
  std::span<cplx> values() { return values_; }

  std::size_t index(long t, long k) const {
    return static_cast<std::size_t>(wrap(t, T_)) * K_ + wrap(k, K_);
  }

  LatticeField &operator+=(const LatticeField &o);
  LatticeField &operator-=(const LatticeField &o);
  LatticeField &operator*=(cplx a);

  bool same_shape(const LatticeField &o) const {
    return T_ == o.T_ && K_ == o.K_;
  }

  bool operator==(const LatticeField &) const = default;

private:
  static long wrap(long i, long n) {
    long r = i % n;
    return r < 0 ? r + n : r;
  }

  int T_ = 0;
  int K_ = 0;
  std::vector<cplx> values_;
};

LatticeField operator+(LatticeField a, const LatticeField &b);
LatticeField operator-(LatticeField a, const LatticeField &b);
LatticeField operator-(LatticeField a);
LatticeField operator*(cplx s, LatticeField a);

/// max over nodes of |phi(t,k)|.
double sup_norm(const LatticeField &phi);
double sup_distance(const LatticeField &a, const LatticeField &b);

/// (Delta_t + Nabla_t) phi, i.e. phi(t+1,k) - phi(t-1,k).
LatticeField central_time_diff(const LatticeField &phi);

/// phi(t,k+1) - 2 phi(t,k) + phi(t,k-1).
LatticeField spatial_laplacian(const LatticeField &phi);

/// L phi = i beta (Delta_t + Nabla_t) phi + epsilon * spatial Laplacian.
LatticeField apply_L(const LatticeField &phi, const LatticeParams &params);

/// F(phi) = -gamma |phi|^2 phi, pointwise.
LatticeField apply_F(const LatticeField &phi, const LatticeParams &params);

/// G(phi)(t,k) = g(t, phi(t,k)). Throws PeriodMismatch if the period of g
/// does not divide T.
LatticeField apply_G(const LatticeField &phi, const Potential &g);

} // namespace dnls
