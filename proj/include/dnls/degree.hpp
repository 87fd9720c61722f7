#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "dnls/certificate.hpp"
#include "dnls/solver.hpp"

namespace dnls {

enum class DegreeTarget { S_map, Q_map };

std::string_view to_string(DegreeTarget t);

struct LocatedZero {
  LatticeField field;
  double residual = 0.0;
  /// Sign of the realified Jacobian determinant; 0 for degenerate zeros.
  int det_sign = 0;
  /// log10 of |det J| relative to Hadamard's bound.
  double log10_relative_det = 0.0;
  bool degenerate() const { return det_sign == 0; }
};

/// Brouwer degree of S or Q on the certified ball, estimated by zero
/// enumeration. The estimate is heuristic: multi-start Newton may miss
/// zeros.
///
/// When every located zero of the map is regular the degree is the sum of
/// their Jacobian signs. Otherwise the zeros of map - p are counted for a
/// small seeded perturbation p, whose size stays below the analytic lower
/// bound of the map on the sphere so that the degree is unchanged.
struct DegreeReport {
  DegreeTarget target = DegreeTarget::S_map;
  double radius = 0.0;
  /// Zeros of the unperturbed map inside the ball.
  std::vector<LocatedZero> zeros;
  /// Zeros whose signs are summed (zeros of map - p when perturbed).
  std::vector<LocatedZero> counted;
  double perturbation = 0.0;
  int degenerate_excluded = 0;
  int degree_estimate = 0;
  /// Degree is odd (only meaningful for S_map, always true for Q_map).
  bool parity_ok = false;
  std::string_view completeness = "heuristic";
};

struct DegreeOptions {
  int n_starts = 32;
  std::uint64_t seed = 0;
  double tol = 1e-10;
  int max_iter = 100;
  /// Refuse realified dimensions beyond this.
  long max_real_dim = 64;
};

/// Sign of det J and its size relative to Hadamard's bound; sign 0 when the
/// relative size is below 1e-12.
std::pair<int, double> jacobian_sign(const Eigen::MatrixXd &J);

DegreeReport estimate_degree(DegreeTarget target, const ShiftedOperator &op,
                             const Potential &g,
                             const ExistenceCertificate &cert,
                             const DegreeOptions &options = {});

} // namespace dnls
