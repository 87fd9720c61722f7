#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <string_view>

#include "dnls/lattice.hpp"
#include "dnls/operator.hpp"
#include "dnls/potential.hpp"

namespace dnls {

/// Whether R* and M come from closed-form formulas or from a grid scan.
enum class Rigor { closed_form, sampled };

std::string_view to_string(Rigor r);

/// Sampled evidence for ||H(phi)|| < ||S(phi)|| on the sphere ||phi|| = R.
struct BoundaryEvidence {
  std::size_t count = 0;
  /// min over samples of ||S(phi)|| - ||H(phi)||.
  double min_gap = std::numeric_limits<double>::infinity();
  std::size_t argmin_index = 0;
  std::uint64_t argmin_hash = 0;
  /// Samples breaking ||H(phi)|| <= B + C||phi|| + D||phi||^3.
  std::size_t upper_bound_violations = 0;
  /// Samples breaking ||S(phi)|| >= 2D||phi||^3 - ||phi||.
  std::size_t lower_bound_violations = 0;

  bool valid() const { return count > 0 && min_gap > 0.0; }
};

/// The constants of the existence argument for one concrete instance.
struct ExistenceCertificate {
  double s = 0.0;
  double norm_L = 0.0;
  double norm_A = 0.0;
  double norm_A_inv = 0.0;
  /// |gamma| / (2 ||A|| ||A^{-1}||), the admissible cubic growth rate of g.
  double c = 0.0;
  double Rstar = 0.0;
  double M = 0.0;
  double B = 0.0;
  double C = 0.0;
  double D = 0.0;
  double R = 0.0;
  double slack = 0.0;
  /// (2DR^3 - R) / (B + CR + DR^3) - 1.
  double margin = 0.0;
  Rigor rigor = Rigor::closed_form;
  BoundaryEvidence evidence;

  bool valid() const;
};

struct ThresholdResult {
  double Rstar = 0.0;
  Rigor rigor = Rigor::closed_form;
};

/// R* with |g(t,z)| < c|z|^3 for |z| >= R*. Uses the potential's closed form
/// when present, otherwise a geometric radius scan with 64 phases and a 1.25
/// safety factor. Throws NoThresholdFound when the scan budget runs out.
ThresholdResult compute_Rstar(const Potential &g, double c);

/// sup of |g(t,z)| over t and |z| <= Rstar.
double compute_M(const Potential &g, double Rstar);

/// Smallest R (to 1e-9) with 2DR^3 - R >= (1 + slack)(B + CR + DR^3).
double compute_radius(double B, double C, double D, double slack = 0.1);

/// Samples the sphere ||phi|| = cert.R and records the smallest gap
/// ||phi - A^{-1}F(phi)|| - ||A^{-1}(G(phi) - s phi)||. Sampling is split
/// into fixed chunks with independent substreams; the merged result does
/// not depend on `workers`.
BoundaryEvidence verify_boundary(const ExistenceCertificate &cert,
                                 const ShiftedOperator &op, const Potential &g,
                                 std::size_t samples, std::uint64_t seed,
                                 unsigned workers = 1);

struct CertifyOptions {
  double slack = 0.1;
  std::size_t samples = 10000;
  std::uint64_t seed = 0;
  unsigned workers = 1;
};

/// Full constant chain plus boundary evidence.
ExistenceCertificate certify(const ShiftedOperator &op, const Potential &g,
                             const CertifyOptions &options = {});

} // namespace dnls
