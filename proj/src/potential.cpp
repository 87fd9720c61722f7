#include "dnls/potential.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace dnls {
namespace {

double max_modulus(const std::vector<cplx> &f) {
  double m = 0.0;
  for (cplx v : f)
    m = std::max(m, std::abs(v));
  return m;
}

void require_coefficients(const std::vector<cplx> &f) {
  if (f.empty())
    throw EmptyCoefficients("potential needs at least one coefficient f(t)");
}

// Realified complex multiplication by a.
Eigen::Matrix2d mult_matrix(cplx a) {
  Eigen::Matrix2d m;
  m << a.real(), -a.imag(), a.imag(), a.real();
  return m;
}

Potential modulus_power(std::string kind, std::vector<cplx> f, double r) {
  const int period = static_cast<int>(f.size());
  auto eval = [f, r](long t, cplx z) -> cplx {
    const double rho = std::abs(z);
    if (rho == 0.0)
      return 0.0;
    return f[t] * std::pow(rho, r - 1.0) * z;
  };
  auto deriv = [f, r](long t, cplx z) -> Eigen::Matrix2d {
    // d(|z|^(r-1) z) = |z|^(r-1) I + (r-1)|z|^(r-3) [x y]^T [x y]
    const double rho = std::max(std::abs(z), 1e-12);
    Eigen::Vector2d v(z.real(), z.imag());
    Eigen::Matrix2d j = std::pow(rho, r - 1.0) * Eigen::Matrix2d::Identity() +
                        (r - 1.0) * std::pow(rho, r - 3.0) * v * v.transpose();
    return mult_matrix(f[t]) * j;
  };
  Potential p(std::move(kind), period, eval);
  p.with_growth_exponent(r).with_derivative(deriv).with_coefficients(
      std::move(f));
  return p;
}

} // namespace

Potential::Potential(std::string kind, int period, Eval eval)
    : kind_(std::move(kind)), period_(period), eval_(std::move(eval)) {
  if (period_ < 1)
    throw InvalidParams("potential period must be >= 1");
}

Potential &Potential::with_growth_exponent(double r) {
  growth_exponent_ = r;
  return *this;
}

Potential &Potential::with_derivative(Derivative d) {
  derivative_ = std::move(d);
  return *this;
}

Potential &Potential::with_bounds(ThresholdFormula threshold,
                                  DiskSupFormula disk_sup) {
  threshold_ = std::move(threshold);
  disk_sup_ = std::move(disk_sup);
  return *this;
}

Potential &Potential::with_coefficients(std::vector<cplx> f) {
  coefficients_ = std::move(f);
  return *this;
}

Eigen::Matrix2d Potential::derivative(long t, cplx z) const {
  if (!derivative_)
    throw MissingDerivative("potential '" + kind_ +
                            "' has no analytic derivative");
  return derivative_(wrap(t), z);
}

Eigen::Matrix2d Potential::derivative_fd(long t, cplx z) const {
  const double h = 1e-6 * (1.0 + std::abs(z));
  const cplx dx = (evaluate(t, z + h) - evaluate(t, z - h)) / (2.0 * h);
  const cplx dy = (evaluate(t, z + cplx(0.0, h)) - evaluate(t, z - cplx(0.0, h))) /
                  (2.0 * h);
  Eigen::Matrix2d j;
  j << dx.real(), dy.real(), dx.imag(), dy.imag();
  return j;
}

Potential power_law(std::vector<cplx> f, double r) {
  require_coefficients(f);
  if (!(r > 0.0 && r < 3.0))
    throw InvalidExponent("power_law exponent must lie in (0, 3), got " +
                          std::to_string(r));
  const double fmax = max_modulus(f);
  Potential p = modulus_power("power_law", std::move(f), r);
  p.with_bounds(
      [fmax, r](double c) {
        // f_max rho^r <= c rho^3  <=>  rho >= (f_max / c)^(1 / (3 - r))
        return fmax == 0.0 ? 1.0 : std::pow(fmax / c, 1.0 / (3.0 - r));
      },
      [fmax, r](double radius) { return fmax * std::pow(radius, r); });
  return p;
}

Potential growth_violator(std::vector<cplx> f, double r) {
  require_coefficients(f);
  if (!(r > 0.0))
    throw InvalidExponent("exponent must be positive, got " +
                          std::to_string(r));
  return modulus_power("growth_violator", std::move(f), r);
}

Potential bounded_potential(std::vector<cplx> f) {
  require_coefficients(f);
  const int period = static_cast<int>(f.size());
  const double fmax = max_modulus(f);
  auto eval = [f](long t, cplx z) -> cplx {
    return f[t] * z / (1.0 + std::norm(z));
  };
  auto deriv = [f](long t, cplx z) -> Eigen::Matrix2d {
    const double q = 1.0 + std::norm(z);
    Eigen::Vector2d v(z.real(), z.imag());
    Eigen::Matrix2d j =
        Eigen::Matrix2d::Identity() / q - 2.0 * v * v.transpose() / (q * q);
    return mult_matrix(f[t]) * j;
  };
  Potential p("bounded", period, eval);
  p.with_derivative(deriv).with_coefficients(std::move(f));
  p.with_bounds(
      [fmax](double c) {
        if (fmax == 0.0)
          return 1.0;
        // f_max |z| / (1 + |z|^2) <= c |z|^3  <=>  c u^2 + c u >= f_max,
        // u = |z|^2
        return std::sqrt(0.5 * (-1.0 + std::sqrt(1.0 + 4.0 * fmax / c)));
      },
      [fmax](double radius) {
        // |z| / (1 + |z|^2) peaks at |z| = 1
        return radius >= 1.0 ? 0.5 * fmax
                             : fmax * radius / (1.0 + radius * radius);
      });
  return p;
}

Potential constant_potential(std::vector<cplx> f) {
  require_coefficients(f);
  const int period = static_cast<int>(f.size());
  const double fmax = max_modulus(f);
  Potential p("constant", period, [f](long t, cplx) { return f[t]; });
  p.with_growth_exponent(0.0)
      .with_derivative(
          [](long, cplx) -> Eigen::Matrix2d { return Eigen::Matrix2d::Zero(); })
      .with_coefficients(std::move(f));
  p.with_bounds(
      [fmax](double c) { return fmax == 0.0 ? 1.0 : std::cbrt(fmax / c); },
      [fmax](double) { return fmax; });
  return p;
}

Potential zero_potential() {
  Potential p("zero", 1, [](long, cplx) { return cplx{}; });
  p.with_derivative(
       [](long, cplx) -> Eigen::Matrix2d { return Eigen::Matrix2d::Zero(); })
      .with_bounds([](double) { return 1.0; }, [](double) { return 0.0; })
      .with_coefficients({});
  return p;
}

GrowthReport growth_check(const Potential &g, std::span<const double> radii) {
  constexpr int kPhases = 64;
  GrowthReport report;
  report.radii.assign(radii.begin(), radii.end());
  for (double rho : radii) {
    double best = 0.0;
    for (long t = 0; t < g.period(); ++t)
      for (int j = 0; j < kPhases; ++j) {
        const double theta = 2.0 * std::numbers::pi * j / kPhases;
        best = std::max(best, std::abs(g.evaluate(t, std::polar(rho, theta))));
      }
    report.ratios.push_back(best / (rho * rho * rho));
  }
  const std::size_t n = report.ratios.size();
  if (n >= 2) {
    report.monotone_decay = true;
    for (std::size_t i = std::min(n / 2, n - 2); i + 1 < n; ++i)
      if (!(report.ratios[i + 1] < report.ratios[i]))
        report.monotone_decay = false;
  }
  return report;
}

} // namespace dnls
