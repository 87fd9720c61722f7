#include "dnls/solver.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dnls/random.hpp"

namespace dnls {
namespace {

constexpr double kDedupRadius = 1e-6;

// Realified complex scalar.
Eigen::Matrix2d block_of(cplx a) {
  Eigen::Matrix2d m;
  m << a.real(), -a.imag(), a.imag(), a.real();
  return m;
}

// d(|z|^2 z) for z = x + iy.
Eigen::Matrix2d cubic_block(cplx z) {
  const double x = z.real();
  const double y = z.imag();
  Eigen::Matrix2d m;
  m << 3 * x * x + y * y, 2 * x * y, 2 * x * y, x * x + 3 * y * y;
  return m;
}

JacobianMode resolve_mode(const Potential &g, std::optional<JacobianMode> m) {
  if (m)
    return *m;
  return g.has_derivative() ? JacobianMode::analytic
                            : JacobianMode::finite_diff;
}

// Convergence measure and the quantity reduced by the line search.
struct Residuals {
  LatticeField fixed_point;
  double direct = 0.0;
  double fixed = 0.0;
};

Residuals evaluate(const LatticeField &phi, const ShiftedOperator &op,
                   const Potential &g, const NewtonOptions &o,
                   const LatticeField *offset_direct) {
  Residuals r;
  LatticeField direct = homotopy_direct(phi, op, g, o.tau);
  if (o.offset)
    direct -= *offset_direct;
  r.direct = sup_norm(direct);
  r.fixed_point = op.apply_inverse(direct);
  r.fixed = sup_norm(r.fixed_point);
  return r;
}

// Deflation factor prod_i (1 + 1/|x - z_i|^2) and the gradient of its log,
// in realified coordinates.
struct Deflation {
  double factor = 1.0;
  Eigen::VectorXd grad_log;
};

Deflation deflation_at(const LatticeField &phi,
                       const std::vector<LatticeField> &known) {
  Deflation d;
  d.grad_log = Eigen::VectorXd::Zero(2 * static_cast<Eigen::Index>(phi.size()));
  const Eigen::VectorXd x = realify(phi);
  for (const auto &z : known) {
    const Eigen::VectorXd diff = x - realify(z);
    const double r2 = std::max(diff.squaredNorm(), 1e-300);
    d.factor *= 1.0 + 1.0 / r2;
    d.grad_log += -2.0 / (r2 * (1.0 + r2)) * diff;
  }
  return d;
}

bool finite(const LatticeField &phi) {
  for (cplx v : phi.values())
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      return false;
  return true;
}

} // namespace

std::string_view to_string(SolveStatus s) {
  switch (s) {
  case SolveStatus::converged:
    return "converged";
  case SolveStatus::diverged:
    return "diverged";
  case SolveStatus::left_ball:
    return "left_ball";
  case SolveStatus::max_iter:
    return "max_iter";
  }
  return "unknown";
}

LatticeField residual_direct(const LatticeField &phi,
                             const LatticeParams &params, const Potential &g) {
  LatticeField r = apply_L(phi, params);
  r -= apply_F(phi, params);
  r -= apply_G(phi, g);
  return r;
}

LatticeField apply_S(const LatticeField &phi, const ShiftedOperator &op) {
  return phi - op.apply_inverse(apply_F(phi, op.params()));
}

LatticeField apply_H(const LatticeField &phi, const ShiftedOperator &op,
                     const Potential &g) {
  LatticeField v = apply_G(phi, g);
  for (std::size_t i = 0; i < v.size(); ++i)
    v[i] -= op.s() * phi[i];
  return op.apply_inverse(v);
}

LatticeField residual_Q(const LatticeField &phi, const ShiftedOperator &op,
                        const Potential &g) {
  return apply_S(phi, op) - apply_H(phi, op, g);
}

LatticeField homotopy_map(const LatticeField &phi, const ShiftedOperator &op,
                          const Potential &g, double tau) {
  LatticeField out = apply_S(phi, op);
  if (tau != 0.0)
    out -= tau * apply_H(phi, op, g);
  return out;
}

LatticeField homotopy_direct(const LatticeField &phi,
                             const ShiftedOperator &op, const Potential &g,
                             double tau) {
  const auto &params = op.params();
  LatticeField r = apply_L(phi, params);
  r -= apply_F(phi, params);
  const double shift = (1.0 - tau) * op.s();
  for (std::size_t i = 0; i < r.size(); ++i)
    r[i] -= shift * phi[i];
  if (tau != 0.0)
    r -= tau * apply_G(phi, g);
  return r;
}

Eigen::VectorXd realify(const LatticeField &phi) {
  Eigen::VectorXd x(2 * static_cast<Eigen::Index>(phi.size()));
  for (std::size_t i = 0; i < phi.size(); ++i) {
    x[2 * i] = phi[i].real();
    x[2 * i + 1] = phi[i].imag();
  }
  return x;
}

LatticeField complexify(const Eigen::VectorXd &x, int T, int K) {
  LatticeField phi(T, K);
  if (x.size() != 2 * static_cast<Eigen::Index>(phi.size()))
    throw DimensionMismatch("realified vector has wrong length");
  for (std::size_t i = 0; i < phi.size(); ++i)
    phi[i] = {x[2 * i], x[2 * i + 1]};
  return phi;
}

Eigen::MatrixXd homotopy_jacobian(const LatticeField &phi,
                                  const ShiftedOperator &op, const Potential &g,
                                  double tau, JacobianMode mode) {
  if (mode == JacobianMode::analytic && tau != 0.0 && !g.has_derivative())
    throw MissingDerivative("analytic Jacobian requested but potential '" +
                            g.kind() + "' has no derivative");
  const auto &params = op.params();
  const Eigen::Index n = static_cast<Eigen::Index>(phi.size());
  const CMatrix &inv = op.A_inverse();

  // Pointwise blocks of F + tau (G - sI).
  std::vector<Eigen::Matrix2d> local(static_cast<std::size_t>(n));
  for (long t = 0; t < phi.T(); ++t)
    for (long k = 0; k < phi.K(); ++k) {
      const std::size_t j = phi.index(t, k);
      const cplx z = phi[j];
      Eigen::Matrix2d b = -params.gamma * cubic_block(z);
      if (tau != 0.0) {
        const Eigen::Matrix2d dg = mode == JacobianMode::analytic
                                       ? g.derivative(t, z)
                                       : g.derivative_fd(t, z);
        b += tau * (dg - op.s() * Eigen::Matrix2d::Identity());
      }
      local[j] = b;
    }

  Eigen::MatrixXd J = Eigen::MatrixXd::Identity(2 * n, 2 * n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      J.block<2, 2>(2 * i, 2 * j) -=
          block_of(inv(i, j)) * local[static_cast<std::size_t>(j)];
  return J;
}

Eigen::MatrixXd realified_jacobian(const LatticeField &phi,
                                   const ShiftedOperator &op,
                                   const Potential &g, JacobianMode mode) {
  return homotopy_jacobian(phi, op, g, 1.0, mode);
}

SolveReport newton_solve(const LatticeField &initial, const ShiftedOperator &op,
                         const Potential &g, const NewtonOptions &o) {
  if (!(o.tol > 0.0))
    throw InvalidParams("Newton tolerance must be positive");
  const JacobianMode mode = resolve_mode(g, o.mode);
  const int T = initial.T();
  const int K = initial.K();
  std::optional<LatticeField> offset_direct;
  if (o.offset)
    offset_direct = op.apply_A(*o.offset);
  const LatticeField *od = offset_direct ? &*offset_direct : nullptr;

  SolveReport report;
  report.solution = initial;
  Residuals res = evaluate(initial, op, g, o, od);

  auto finish = [&](SolveStatus status) {
    report.status = status;
    report.residual_direct = res.direct;
    report.residual_Q = res.fixed;
    return report;
  };

  for (int it = 0;; ++it) {
    if (!finite(report.solution) || !std::isfinite(res.direct))
      return finish(SolveStatus::diverged);
    if (res.direct <= o.tol)
      return finish(SolveStatus::converged);
    if (it >= o.max_iter)
      return finish(SolveStatus::max_iter);

    const Eigen::MatrixXd J =
        homotopy_jacobian(report.solution, op, g, o.tau, mode);
    const Eigen::VectorXd rhs = -realify(res.fixed_point);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(J);
    Eigen::VectorXd step;
    if (lu.rcond() > 1e-12) {
      step = lu.solve(rhs);
    } else {
      // Near-singular: minimum-norm least-squares step.
      step = Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd>(J).solve(
          rhs);
    }
    double merit = res.fixed;
    if (!o.deflate.empty()) {
      // Newton step of the deflated residual m(x) r(x): the undeflated
      // step rescaled by 1 / (1 - grad log m . step).
      const Deflation d = deflation_at(report.solution, o.deflate);
      const double denom = 1.0 - d.grad_log.dot(step);
      if (denom == 0.0)
        return finish(SolveStatus::diverged);
      step /= denom;
      merit *= d.factor;
    }
    if (!step.allFinite())
      return finish(SolveStatus::diverged);

    const LatticeField delta = complexify(step, T, K);
    double alpha = 1.0;
    bool accepted = false;
    for (int h = 0; h <= o.max_halvings; ++h, alpha *= 0.5) {
      LatticeField trial = report.solution + cplx(alpha) * delta;
      Residuals tr = evaluate(trial, op, g, o, od);
      const double trial_merit =
          o.deflate.empty() ? tr.fixed
                            : tr.fixed * deflation_at(trial, o.deflate).factor;
      if (trial_merit < merit || tr.direct <= o.tol) {
        report.solution = std::move(trial);
        res = std::move(tr);
        accepted = true;
        break;
      }
    }
    ++report.newton_iterations;
    if (!accepted)
      return finish(SolveStatus::diverged);
  }
}

SolveReport newton_solve(const LatticeField &initial, const ShiftedOperator &op,
                         const Potential &g, double tol, int max_iter) {
  NewtonOptions o;
  o.tol = tol;
  o.max_iter = max_iter;
  return newton_solve(initial, op, g, o);
}

SolveReport homotopy_solve(const ShiftedOperator &op, const Potential &g,
                           const ExistenceCertificate &cert,
                           const HomotopyOptions &options) {
  if (!cert.valid())
    throw Error("homotopy continuation needs a valid certificate");
  if (!(options.step0 > 0.0))
    throw InvalidParams("initial homotopy step must be positive");
  const auto &params = op.params();

  SolveReport report;
  report.solution = LatticeField::zeros(params);
  report.path.emplace_back(0.0, 0.0);

  double tau = 0.0;
  double step = std::min(options.step0, 1.0);
  std::optional<std::pair<double, LatticeField>> previous;
  int successes = 0;

  NewtonOptions corrector;
  corrector.tol = options.tol;
  corrector.max_iter = options.corrector_max_iter;

  while (tau < 1.0) {
    const double next = std::min(1.0, tau + step);
    // Secant predictor through the last two accepted points.
    LatticeField guess = report.solution;
    if (previous) {
      const double w = (next - tau) / (tau - previous->first);
      guess += cplx(w) * (report.solution - previous->second);
    }
    corrector.tau = next;
    SolveReport c = newton_solve(guess, op, g, corrector);
    report.newton_iterations += c.newton_iterations;

    if (c.converged()) {
      const double norm = sup_norm(c.solution);
      if (!(norm < cert.R)) {
        report.solution = std::move(c.solution);
        report.status = SolveStatus::left_ball;
        break;
      }
      previous.emplace(tau, std::move(report.solution));
      report.solution = std::move(c.solution);
      tau = next;
      ++report.homotopy_steps;
      report.path.emplace_back(tau, norm);
      if (++successes >= 2) {
        step *= 1.5;
        successes = 0;
      }
      if (tau >= 1.0)
        report.status = SolveStatus::converged;
    } else {
      step *= 0.5;
      successes = 0;
      if (step < options.min_step) {
        report.status = SolveStatus::diverged;
        break;
      }
    }
  }

  const LatticeField rd = residual_direct(report.solution, params, g);
  report.residual_direct = sup_norm(rd);
  report.residual_Q = sup_norm(op.apply_inverse(rd));
  if (report.status == SolveStatus::converged &&
      !(report.residual_direct <= options.tol))
    report.status = SolveStatus::diverged;
  return report;
}

std::vector<SolveReport> enumerate_zeros(const std::vector<LatticeField> &starts,
                                         const ShiftedOperator &op,
                                         const Potential &g, double radius,
                                         const NewtonOptions &options,
                                         bool deflation) {
  std::vector<SolveReport> found;
  NewtonOptions o = options;
  auto attempt = [&](const LatticeField &start) {
    if (deflation) {
      o.deflate.clear();
      for (const auto &f : found)
        o.deflate.push_back(f.solution);
    }
    SolveReport r = newton_solve(start, op, g, o);
    if (!r.converged() || !(sup_norm(r.solution) < radius))
      return;
    auto same = std::find_if(found.begin(), found.end(), [&](const auto &f) {
      return sup_distance(f.solution, r.solution) < kDedupRadius;
    });
    if (same == found.end())
      found.push_back(std::move(r));
    else if (r.residual_direct < same->residual_direct)
      *same = std::move(r);
  };
  for (const auto &start : starts)
    attempt(start);
  if (deflation) {
    // Deflated restarts from every zero found so far (including the ones
    // these restarts discover): small shifts, and the images under the
    // phase rotations by i, -1, -i, which map zero sets of odd and
    // phase-equivariant maps into themselves.
    for (std::size_t i = 0; i < found.size(); ++i) {
      const LatticeField z = found[i].solution;
      const double eta = 0.05 * (1.0 + sup_norm(z));
      for (cplx dir : {cplx(1, 0), cplx(-1, 0), cplx(0, 1), cplx(0, -1)}) {
        attempt(z + LatticeField::constant(z.T(), z.K(), eta * dir));
        if (dir != cplx(1, 0))
          attempt(dir * z);
      }
    }
  }
  return found;
}

std::vector<SolveReport> multi_start(const ShiftedOperator &op,
                                     const Potential &g,
                                     const ExistenceCertificate &cert,
                                     int n_starts, std::uint64_t seed,
                                     const NewtonOptions &options) {
  if (n_starts < 1)
    throw InvalidParams("multi_start needs at least one start");
  const auto &params = op.params();
  std::vector<LatticeField> starts;
  HomotopyOptions ho;
  ho.tol = options.tol;
  SolveReport endpoint = homotopy_solve(op, g, cert, ho);
  if (endpoint.converged())
    starts.push_back(endpoint.solution);
  Rng rng(substream_seed(seed, 0));
  for (int i = 0; i < n_starts; ++i)
    starts.push_back(random_field_in_ball(rng, params.T, params.K, cert.R));
  return enumerate_zeros(starts, op, g, cert.R, options);
}

SolveReport solve(const ShiftedOperator &op, const Potential &g,
                  const ExistenceCertificate &cert,
                  const SolveOptions &options) {
  NewtonOptions polish;
  polish.tol = options.tol;
  polish.max_iter = options.max_iter;

  SolveReport tracked;
  if (cert.valid()) {
    HomotopyOptions ho;
    ho.step0 = options.step0;
    ho.tol = options.tol;
    tracked = homotopy_solve(op, g, cert, ho);
    if (tracked.converged()) {
      SolveReport polished = newton_solve(tracked.solution, op, g, polish);
      if (polished.converged()) {
        polished.newton_iterations += tracked.newton_iterations;
        polished.homotopy_steps = tracked.homotopy_steps;
        polished.path = std::move(tracked.path);
        return polished;
      }
      return tracked;
    }
  }

  // Continuation failed: plain Newton from seeded starts in the ball.
  const auto &params = op.params();
  const double radius = cert.R > 0.0 ? cert.R : 1.0;
  Rng rng(substream_seed(options.seed, 0));
  std::vector<LatticeField> starts;
  if (!tracked.solution.values().empty())
    starts.push_back(tracked.solution);
  starts.push_back(LatticeField::zeros(params));
  for (int i = 0; i < options.n_starts; ++i)
    starts.push_back(random_field_in_ball(rng, params.T, params.K, radius));
  for (const auto &start : starts) {
    SolveReport r = newton_solve(start, op, g, polish);
    if (r.converged()) {
      r.homotopy_steps = tracked.homotopy_steps;
      r.path = tracked.path;
      return r;
    }
  }
  if (tracked.solution.values().empty()) {
    tracked.solution = LatticeField::zeros(params);
    tracked.status = SolveStatus::diverged;
  }
  return tracked;
}

SteadyStateResult steady_state_solve(int K, double epsilon, double gamma,
                                     const Potential &h,
                                     const SteadyStateOptions &options) {
  if (h.period() != 1)
    throw PeriodMismatch("steady-state forcing must have period 1");
  LatticeParams params{.T = 1, .K = K, .beta = 1.0, .epsilon = epsilon,
                       .gamma = gamma};
  params.validate();
  const ShiftedOperator op = build_shifted(params, options.shift_factor);
  SteadyStateResult out;
  out.certificate = certify(op, h, options.certify);
  out.report = solve(op, h, out.certificate, options.solve);
  const auto row = out.report.solution.values();
  out.u.assign(row.begin(), row.end());
  return out;
}

} // namespace dnls
