#include "dnls/certificate.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <future>
#include <numbers>
#include <string>
#include <vector>

#include "dnls/random.hpp"

namespace dnls {
namespace {

constexpr int kPhases = 64;
constexpr double kScanMin = 1e-3;
constexpr double kScanMax = 1e9;
constexpr double kScanStep = 1.189207115002721; // 2^(1/4)
constexpr double kGrowthSpan = 1e3;
constexpr double kThresholdSafety = 1.25;
constexpr double kSupSafety = 1.05;
constexpr std::size_t kChunk = 256;

double circle_max(const Potential &g, double rho) {
  double best = 0.0;
  for (long t = 0; t < g.period(); ++t)
    for (int j = 0; j < kPhases; ++j) {
      const double theta = 2.0 * std::numbers::pi * j / kPhases;
      best = std::max(best, std::abs(g.evaluate(t, std::polar(rho, theta))));
    }
  return best;
}

std::uint64_t field_hash(const LatticeField &phi) {
  // FNV-1a over the bit patterns of the entries.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (cplx v : phi.values())
    for (double x : {v.real(), v.imag()}) {
      auto bits = std::bit_cast<std::uint64_t>(x);
      for (int b = 0; b < 8; ++b) {
        h ^= (bits >> (8 * b)) & 0xff;
        h *= 0x100000001b3ULL;
      }
    }
  return h;
}

void merge(BoundaryEvidence &into, const BoundaryEvidence &part) {
  into.count += part.count;
  into.upper_bound_violations += part.upper_bound_violations;
  into.lower_bound_violations += part.lower_bound_violations;
  if (part.count == 0)
    return;
  if (part.min_gap < into.min_gap ||
      (part.min_gap == into.min_gap && part.argmin_index < into.argmin_index)) {
    into.min_gap = part.min_gap;
    into.argmin_index = part.argmin_index;
    into.argmin_hash = part.argmin_hash;
  }
}

BoundaryEvidence sample_chunk(const ExistenceCertificate &cert,
                              const ShiftedOperator &op, const Potential &g,
                              std::size_t first, std::size_t last,
                              std::uint64_t seed, std::size_t chunk) {
  const auto &params = op.params();
  Rng rng(substream_seed(seed, chunk));
  BoundaryEvidence ev;
  for (std::size_t i = first; i < last; ++i) {
    const LatticeField phi =
        random_field_on_sphere(rng, params.T, params.K, cert.R);
    const double norm = sup_norm(phi);
    const double s_norm =
        sup_norm(phi - op.apply_inverse(apply_F(phi, params)));
    LatticeField shifted = apply_G(phi, g);
    for (std::size_t j = 0; j < phi.size(); ++j)
      shifted[j] -= op.s() * phi[j];
    const double h_norm = sup_norm(op.apply_inverse(shifted));

    const double upper = cert.B + cert.C * norm + cert.D * norm * norm * norm;
    const double lower = 2.0 * cert.D * norm * norm * norm - norm;
    if (h_norm > upper * (1.0 + 1e-12))
      ++ev.upper_bound_violations;
    if (s_norm < lower - 1e-12 * std::abs(lower))
      ++ev.lower_bound_violations;

    const double gap = s_norm - h_norm;
    ++ev.count;
    if (gap < ev.min_gap) {
      ev.min_gap = gap;
      ev.argmin_index = i;
      ev.argmin_hash = field_hash(phi);
    }
  }
  return ev;
}

} // namespace

std::string_view to_string(Rigor r) {
  return r == Rigor::closed_form ? "closed_form" : "sampled";
}

bool ExistenceCertificate::valid() const {
  return R > 0.0 && margin >= slack * (1.0 - 1e-9) && evidence.valid();
}

ThresholdResult compute_Rstar(const Potential &g, double c) {
  if (!(c > 0.0))
    throw InvalidParams("threshold coefficient c must be positive");
  if (g.has_bounds())
    return {g.closed_form_threshold(c), Rigor::closed_form};

  std::vector<double> radii;
  for (double rho = kScanMin; rho <= kScanMax; rho *= kScanStep)
    radii.push_back(rho);
  // Index just past the last radius where the cubic ratio is not below c.
  std::size_t first_ok = 0;
  for (std::size_t i = 0; i < radii.size(); ++i) {
    const double rho = radii[i];
    if (!(circle_max(g, rho) < c * rho * rho * rho))
      first_ok = i + 1;
  }
  if (first_ok >= radii.size() || radii[first_ok] * kGrowthSpan > kScanMax)
    throw NoThresholdFound(
        "|g(t,z)| / |z|^3 did not stay below c = " + std::to_string(c) +
        " within the scanned radii; g may violate the subcubic growth "
        "hypothesis");
  return {kThresholdSafety * radii[first_ok], Rigor::sampled};
}

double compute_M(const Potential &g, double Rstar) {
  if (!(Rstar > 0.0))
    throw InvalidParams("Rstar must be positive");
  if (g.has_bounds())
    return g.closed_form_disk_sup(Rstar);

  constexpr int kRadii = 64;
  double best = 0.0;
  double best_rho = 0.0;
  double best_theta = 0.0;
  long best_t = 0;
  for (long t = 0; t < g.period(); ++t)
    for (int i = 0; i <= kRadii; ++i)
      for (int j = 0; j < kPhases; ++j) {
        const double rho = Rstar * i / kRadii;
        const double theta = 2.0 * std::numbers::pi * j / kPhases;
        const double v = std::abs(g.evaluate(t, std::polar(rho, theta)));
        if (v > best) {
          best = v;
          best_rho = rho;
          best_theta = theta;
          best_t = t;
        }
      }
  // One refinement pass around the running maximum.
  constexpr int kFine = 32;
  const double dr = Rstar / kRadii;
  const double dtheta = 2.0 * std::numbers::pi / kPhases;
  for (int i = 0; i <= kFine; ++i)
    for (int j = 0; j <= kFine; ++j) {
      const double rho =
          std::clamp(best_rho + dr * (2.0 * i / kFine - 1.0), 0.0, Rstar);
      const double theta = best_theta + dtheta * (2.0 * j / kFine - 1.0);
      best = std::max(best,
                      std::abs(g.evaluate(best_t, std::polar(rho, theta))));
    }
  return kSupSafety * best;
}

double compute_radius(double B, double C, double D, double slack) {
  if (!(D > 0.0) || C < 0.0 || B < 0.0)
    throw InvalidParams("compute_radius needs D > 0, C >= 0, B >= 0");
  if (!(slack >= 0.0 && slack < 1.0))
    throw InvalidParams("slack must lie in [0, 1)");
  const double k = 1.0 + slack;
  // Dividing the target inequality by R > 0 gives a strictly increasing
  // function of R that is negative near 0.
  auto excess = [&](double R) {
    return (2.0 - k) * D * R * R - (1.0 + k * C) - k * B / R;
  };
  double lo = 0.0;
  double hi = 1.0;
  while (excess(hi) < 0.0) {
    lo = hi;
    hi *= 2.0;
  }
  for (int it = 0; it < 400 && hi - lo > 1e-9; ++it) {
    const double mid = 0.5 * (lo + hi);
    (excess(mid) < 0.0 ? lo : hi) = mid;
  }
  return hi;
}

BoundaryEvidence verify_boundary(const ExistenceCertificate &cert,
                                 const ShiftedOperator &op, const Potential &g,
                                 std::size_t samples, std::uint64_t seed,
                                 unsigned workers) {
  if (!(cert.R > 0.0))
    throw InvalidParams("certificate radius must be positive");
  if (!g.compatible_with(op.params().T))
    throw PeriodMismatch("potential period does not divide T");

  const std::size_t chunks = (samples + kChunk - 1) / kChunk;
  auto run = [&](std::size_t chunk) {
    const std::size_t first = chunk * kChunk;
    const std::size_t last = std::min(samples, first + kChunk);
    return sample_chunk(cert, op, g, first, last, seed, chunk);
  };

  std::vector<BoundaryEvidence> parts(chunks);
  if (workers <= 1) {
    for (std::size_t c = 0; c < chunks; ++c)
      parts[c] = run(c);
  } else {
    std::vector<std::future<void>> jobs;
    for (unsigned w = 0; w < workers; ++w)
      jobs.push_back(std::async(std::launch::async, [&, w] {
        for (std::size_t c = w; c < chunks; c += workers)
          parts[c] = run(c);
      }));
    for (auto &j : jobs)
      j.get();
  }

  BoundaryEvidence ev;
  for (const auto &p : parts)
    merge(ev, p);
  return ev;
}

ExistenceCertificate certify(const ShiftedOperator &op, const Potential &g,
                             const CertifyOptions &options) {
  const double abs_gamma = std::abs(op.params().gamma);
  ExistenceCertificate cert;
  cert.s = op.s();
  cert.norm_L = op.norm_L();
  cert.norm_A = op.norm_A();
  cert.norm_A_inv = op.norm_A_inv();
  cert.c = abs_gamma / (2.0 * cert.norm_A * cert.norm_A_inv);

  const ThresholdResult threshold = compute_Rstar(g, cert.c);
  cert.Rstar = threshold.Rstar;
  cert.rigor = threshold.rigor;
  cert.M = compute_M(g, cert.Rstar);

  cert.B = cert.norm_A_inv * cert.M;
  cert.C = cert.norm_A_inv * cert.s;
  cert.D = abs_gamma / (2.0 * cert.norm_A);
  cert.slack = options.slack;
  cert.R = compute_radius(cert.B, cert.C, cert.D, options.slack);
  const double R = cert.R;
  cert.margin = (2.0 * cert.D * R * R * R - R) /
                    (cert.B + cert.C * R + cert.D * R * R * R) -
                1.0;

  cert.evidence =
      verify_boundary(cert, op, g, options.samples, options.seed,
                      options.workers);
  return cert;
}

} // namespace dnls
