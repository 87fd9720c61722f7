#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "dnls/error.hpp"

namespace dnls {

using cplx = std::complex<double>;


/// The forcing term g(t, z), T-periodic in t.
///
/// A Potential optionally carries the real 2x2 Jacobian of the realified map
/// (x, y) -> (Re g, Im g) and closed-form bounds used by the certificate:
/// a threshold rule c -> R* with |g(t,z)| <= c|z|^3 for |z| >= R*, and the
/// supremum of |g| over a disk of given radius.
/// Instances are immutable and safe to evaluate concurrently.
class Potential {
public:
  using Eval = std::function<cplx(long, cplx)>;
  using Derivative = std::function<Eigen::Matrix2d(long, cplx)>;
  using ThresholdFormula = std::function<double(double c)>;
  using DiskSupFormula = std::function<double(double radius)>;

  Potential(std::string kind, int period, Eval eval);

  Potential &with_growth_exponent(double r);
  Potential &with_derivative(Derivative d);
  Potential &with_bounds(ThresholdFormula threshold, DiskSupFormula disk_sup);
  Potential &with_coefficients(std::vector<cplx> f);

  const std::string &kind() const { return kind_; }
  int period() const { return period_; }
  std::optional<double> growth_exponent() const { return growth_exponent_; }
  const std::vector<cplx> &coefficients() const { return coefficients_; }

  cplx evaluate(long t, cplx z) const { return eval_(wrap(t), z); }

  bool has_derivative() const { return static_cast<bool>(derivative_); }
  /// Throws MissingDerivative when no analytic derivative is attached.
  Eigen::Matrix2d derivative(long t, cplx z) const;
  /// Central differences of the realified map with step 1e-6 (1 + |z|).
  Eigen::Matrix2d derivative_fd(long t, cplx z) const;

  bool has_bounds() const { return static_cast<bool>(threshold_); }
  double closed_form_threshold(double c) const { return threshold_(c); }
  double closed_form_disk_sup(double radius) const { return disk_sup_(radius); }

  /// True when the period divides T.
  bool compatible_with(int T) const { return T % period_ == 0; }

private:
  long wrap(long t) const {
    long r = t % period_;
    return r < 0 ? r + period_ : r;
  }

  std::string kind_;
  int period_;
  Eval eval_;
  std::optional<double> growth_exponent_;
  Derivative derivative_;
  ThresholdFormula threshold_;
  DiskSupFormula disk_sup_;
  std::vector<cplx> coefficients_;
};

/// g(t, z) = f(t) |z|^(r-1) z with 0 < r < 3. This is the modulus-preserving
/// reading of f(t) z^r: |g| = |f(t)| |z|^r and g is odd in z.
Potential power_law(std::vector<cplx> f, double r);

/// g(t, z) = f(t) z / (1 + |z|^2). Bounded by max |f| / 2.
Potential bounded_potential(std::vector<cplx> f);

/// g(t, z) = f(t), independent of z.
Potential constant_potential(std::vector<cplx> f);

/// g = 0.
Potential zero_potential();

/// f(t) |z|^(r-1) z for any r > 0, without closed-form bounds. With r >= 3
/// this violates the subcubic growth hypothesis; it exists so that the
/// certificate's rejection path can be exercised.
Potential growth_violator(std::vector<cplx> f, double r);

struct GrowthReport {
  std::vector<double> radii;
  /// max_t max_{|z| = rho} |g(t, z)| / rho^3 for each radius.
  std::vector<double> ratios;
  /// Strictly decreasing over the second half of the radii.
  bool monotone_decay = false;
};

/// Samples the cubic growth ratio on circles of the given radii (64 phases).
/// Diagnostic only: sampling cannot establish the limit.
GrowthReport growth_check(const Potential &g, std::span<const double> radii);

} // namespace dnls
