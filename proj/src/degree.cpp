#include "dnls/degree.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "dnls/random.hpp"

namespace dnls {
namespace {

constexpr double kDegenerateRelDet = 1e-12;
constexpr int kRotations = 16;
constexpr int kPerturbedStartFactor = 16;
constexpr int kPerturbedIterFactor = 3;
constexpr double kPerturbationFraction = 0.1;

// Distance between a and the closest phase rotation of b.
double phase_aligned_distance(const LatticeField &a, const LatticeField &b) {
  cplx inner = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    inner += std::conj(b[i]) * a[i];
  const cplx phase = std::abs(inner) > 0.0 ? inner / std::abs(inner) : 1.0;
  return sup_distance(a, phase * b);
}

std::vector<LocatedZero> classify(const std::vector<SolveReport> &reports,
                                  const ShiftedOperator &op,
                                  const Potential &g, double tau,
                                  const std::optional<LatticeField> &offset) {
  std::vector<LocatedZero> out;
  for (const auto &r : reports) {
    LocatedZero z;
    z.field = r.solution;
    // Residual re-evaluated from scratch rather than taken from Newton.
    LatticeField res = homotopy_direct(r.solution, op, g, tau);
    if (offset)
      res -= op.apply_A(*offset);
    z.residual = sup_norm(res);
    const auto mode = g.has_derivative() ? JacobianMode::analytic
                                         : JacobianMode::finite_diff;
    auto [sign, rel] =
        jacobian_sign(homotopy_jacobian(r.solution, op, g, tau, mode));
    z.det_sign = sign;
    z.log10_relative_det = rel;
    out.push_back(std::move(z));
  }
  return out;
}

} // namespace

std::string_view to_string(DegreeTarget t) {
  return t == DegreeTarget::S_map ? "S_map" : "Q_map";
}

std::pair<int, double> jacobian_sign(const Eigen::MatrixXd &J) {
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(J);
  const Eigen::MatrixXd &u = lu.matrixLU();
  double log_det = 0.0;
  int sign = 1;
  for (Eigen::Index i = 0; i < u.rows(); ++i) {
    const double d = u(i, i);
    if (d == 0.0)
      return {0, -std::numeric_limits<double>::infinity()};
    log_det += std::log10(std::abs(d));
    if (d < 0.0)
      sign = -sign;
  }
  sign *= static_cast<int>(lu.permutationP().determinant());
  double log_hadamard = 0.0;
  for (Eigen::Index j = 0; j < J.cols(); ++j)
    log_hadamard += std::log10(J.col(j).norm());
  const double rel = log_det - log_hadamard;
  if (rel < std::log10(kDegenerateRelDet))
    return {0, rel};
  return {sign, rel};
}

DegreeReport estimate_degree(DegreeTarget target, const ShiftedOperator &op,
                             const Potential &g,
                             const ExistenceCertificate &cert,
                             const DegreeOptions &options) {
  const auto &params = op.params();
  const long real_dim = 2L * static_cast<long>(params.size());
  if (real_dim > options.max_real_dim)
    throw DimensionTooLarge("realified dimension " + std::to_string(real_dim) +
                            " exceeds " + std::to_string(options.max_real_dim));
  if (!cert.valid())
    throw Error("degree estimation needs a valid certificate");

  const double tau = target == DegreeTarget::S_map ? 0.0 : 1.0;
  const double R = cert.R;
  DegreeReport report;
  report.target = target;
  report.radius = R;

  NewtonOptions newton;
  newton.tol = options.tol;
  newton.max_iter = options.max_iter;
  newton.tau = tau;

  std::vector<LatticeField> starts{LatticeField::zeros(params)};
  Rng rng(substream_seed(options.seed, 0));
  for (int i = 0; i < options.n_starts; ++i)
    starts.push_back(random_field_in_ball(rng, params.T, params.K, R));
  report.zeros =
      classify(enumerate_zeros(starts, op, g, R, newton), op, g, tau, {});

  const bool any_degenerate =
      std::any_of(report.zeros.begin(), report.zeros.end(),
                  [](const auto &z) { return z.degenerate(); });
  {
    // Lower bound of ||map|| on the sphere ||phi|| = R.
    const double D = cert.D;
    double bound = 2.0 * D * R * R * R - R;
    if (target == DegreeTarget::Q_map)
      bound -= cert.B + cert.C * R + D * R * R * R;
    if (any_degenerate) {
      report.perturbation = kPerturbationFraction * std::min(1.0, bound);
      Rng prng(substream_seed(options.seed, 1));
      LatticeField p = random_field_in_ball(prng, params.T, params.K, 1.0);
      p *= report.perturbation / sup_norm(p);
      newton.offset = p;
    }
    // Perturbed zeros near former orbits sit in shallow valleys.
    newton.max_iter = kPerturbedIterFactor * options.max_iter;

    // Zeros related by a global phase are seeded once, at several phases.
    std::vector<const LatticeField *> representatives;
    for (const auto &z : report.zeros)
      if (std::none_of(representatives.begin(), representatives.end(),
                       [&](const LatticeField *r) {
                         return phase_aligned_distance(z.field, *r) < 1e-4;
                       }))
        representatives.push_back(&z.field);

    std::vector<LatticeField> pstarts{LatticeField::zeros(params)};
    for (const LatticeField *z : representatives)
      for (int j = 0; j < kRotations; ++j)
        pstarts.push_back(
            std::polar(1.0, 2.0 * std::numbers::pi * j / kRotations) * *z);
    Rng srng(substream_seed(options.seed, 2));
    for (int i = 0; i < kPerturbedStartFactor * options.n_starts; ++i)
      pstarts.push_back(random_field_in_ball(srng, params.T, params.K, R));
    report.counted =
        classify(enumerate_zeros(pstarts, op, g, R, newton, true), op, g, tau,
                 newton.offset);
  }

  for (const auto &z : report.counted) {
    if (z.degenerate())
      ++report.degenerate_excluded;
    report.degree_estimate += z.det_sign;
  }
  report.parity_ok = target == DegreeTarget::Q_map ||
                     std::abs(report.degree_estimate) % 2 == 1;
  return report;
}

} // namespace dnls
