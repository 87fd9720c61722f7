#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "dnls/certificate.hpp"
#include "dnls/lattice.hpp"
#include "dnls/operator.hpp"
#include "dnls/potential.hpp"

namespace dnls {

enum class SolveStatus { converged, diverged, left_ball, max_iter };
enum class JacobianMode { analytic, finite_diff };

std::string_view to_string(SolveStatus s);

struct SolveReport {
  LatticeField solution;
  /// sup norm of the equation residual. For a slice tau < 1 of the
  /// homotopy this is the residual of A (S - tau H).
  double residual_direct = 0.0;
  /// sup norm of the fixed-point form residual (Q, or S - tau H on a slice).
  double residual_Q = 0.0;
  int newton_iterations = 0;
  int homotopy_steps = 0;
  /// (tau, ||phi||) at each accepted continuation step.
  std::vector<std::pair<double, double>> path;
  SolveStatus status = SolveStatus::diverged;

  bool converged() const { return status == SolveStatus::converged; }
};

/// L phi - F(phi) - G(phi); zero exactly at lattice solutions.
LatticeField residual_direct(const LatticeField &phi,
                             const LatticeParams &params, const Potential &g);

/// S(phi) = phi - A^{-1} F(phi).
LatticeField apply_S(const LatticeField &phi, const ShiftedOperator &op);

/// H(phi) = A^{-1}(G(phi) - s phi).
LatticeField apply_H(const LatticeField &phi, const ShiftedOperator &op,
                     const Potential &g);

/// Q(phi) = S(phi) - H(phi) = A^{-1} residual_direct(phi).
LatticeField residual_Q(const LatticeField &phi, const ShiftedOperator &op,
                        const Potential &g);

/// S(phi) - tau H(phi): S at tau = 0 and Q at tau = 1.
LatticeField homotopy_map(const LatticeField &phi, const ShiftedOperator &op,
                          const Potential &g, double tau);

/// A (S - tau H)(phi) = (L - (1 - tau) s) phi - F(phi) - tau G(phi).
LatticeField homotopy_direct(const LatticeField &phi,
                             const ShiftedOperator &op, const Potential &g,
                             double tau);

/// Interleaved (Re, Im) real vector of a field.
Eigen::VectorXd realify(const LatticeField &phi);
LatticeField complexify(const Eigen::VectorXd &x, int T, int K);

/// Real 2TK x 2TK Jacobian of S - tau H at phi, interleaved (Re, Im).
Eigen::MatrixXd homotopy_jacobian(const LatticeField &phi,
                                  const ShiftedOperator &op, const Potential &g,
                                  double tau, JacobianMode mode);

/// Jacobian of residual_Q. Throws MissingDerivative for mode analytic when
/// g has no derivative.
Eigen::MatrixXd realified_jacobian(const LatticeField &phi,
                                   const ShiftedOperator &op,
                                   const Potential &g, JacobianMode mode);

struct NewtonOptions {
  double tol = 1e-10;
  int max_iter = 100;
  /// Homotopy slice; 1 solves Q(phi) = 0.
  double tau = 1.0;
  /// Solve S - tau H = offset instead of = 0 (used for regular-value
  /// perturbations).
  std::optional<LatticeField> offset;
  int max_halvings = 30;
  /// Known zeros to deflate: the residual is scaled by
  /// prod_i (1 + 1 / |phi - z_i|^2), which repels iterates from them.
  std::vector<LatticeField> deflate;
  /// Defaults to analytic when g carries a derivative.
  std::optional<JacobianMode> mode;
};

/// Damped Newton on the realified fixed-point form. A full step is tried
/// first and halved until the residual sup norm decreases. Convergence is
/// judged on the direct residual.
SolveReport newton_solve(const LatticeField &initial, const ShiftedOperator &op,
                         const Potential &g, const NewtonOptions &options);

SolveReport newton_solve(const LatticeField &initial, const ShiftedOperator &op,
                         const Potential &g, double tol, int max_iter);

struct HomotopyOptions {
  double step0 = 0.25;
  double tol = 1e-10;
  int corrector_max_iter = 25;
  double min_step = 1e-6;
};

/// Tracks the zero of S - tau H starting from phi = 0 at tau = 0 up to
/// tau = 1. Requires a valid certificate; stops with left_ball when a
/// corrected point leaves the certified ball.
SolveReport homotopy_solve(const ShiftedOperator &op, const Potential &g,
                           const ExistenceCertificate &cert,
                           const HomotopyOptions &options = {});

/// Newton from each start on the slice tau (and offset); returns the
/// converged zeros strictly inside the ball of the given radius,
/// deduplicated at sup distance 1e-6 with ties going to the smaller
/// residual, then to the earlier start. With `deflation`, each start is
/// run with every zero found so far deflated.
std::vector<SolveReport> enumerate_zeros(const std::vector<LatticeField> &starts,
                                         const ShiftedOperator &op,
                                         const Potential &g, double radius,
                                         const NewtonOptions &options,
                                         bool deflation = false);

/// Homotopy endpoint plus Newton from n_starts fields uniform in the
/// certified ball, deduplicated.
std::vector<SolveReport> multi_start(const ShiftedOperator &op,
                                     const Potential &g,
                                     const ExistenceCertificate &cert,
                                     int n_starts, std::uint64_t seed,
                                     const NewtonOptions &options = {});

struct SolveOptions {
  double tol = 1e-10;
  int max_iter = 100;
  double step0 = 0.25;
  int n_starts = 32;
  std::uint64_t seed = 0;
};

/// Homotopy continuation and Newton polish; multi-start Newton when the
/// continuation fails.
SolveReport solve(const ShiftedOperator &op, const Potential &g,
                  const ExistenceCertificate &cert, const SolveOptions &options);

struct SteadyStateResult {
  std::vector<cplx> u;
  SolveReport report;
  ExistenceCertificate certificate;
};

struct SteadyStateOptions {
  double shift_factor = 1.5;
  CertifyOptions certify{.slack = 0.1, .samples = 2000, .seed = 0, .workers = 1};
  SolveOptions solve;
};

/// Time-independent solution of
///   epsilon (u(k+1) - 2u(k) + u(k-1)) + gamma |u(k)|^2 u(k) = h(u(k)),
/// found through the T = 1 instance of the full problem.
SteadyStateResult steady_state_solve(int K, double epsilon, double gamma,
                                     const Potential &h,
                                     const SteadyStateOptions &options = {});

} // namespace dnls
