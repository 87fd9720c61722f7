#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "dnls/certificate.hpp"
#include "dnls/degree.hpp"
#include "dnls/lattice.hpp"
#include "dnls/potential.hpp"
#include "dnls/solver.hpp"

namespace dnls::cli {

/// Process exit codes.
enum ExitCode : int {
  kOk = 0,
  kConfigError = 1,
  kCertificateError = 2,
  kSolverError = 3,
  kDegreeError = 4,
};

struct PotentialSpec {
  std::string kind = "zero";
  std::vector<cplx> coefficients;
  std::optional<double> exponent;
};

struct RunConfig {
  LatticeParams params;
  PotentialSpec potential;
  double shift_factor = 1.5;
  double slack = 0.1;
  double tolerance = 1e-10;
  int max_iter = 100;
  std::size_t samples = 10000;
  int n_starts = 32;
  std::uint64_t seed = 0;
  double step0 = 0.25;
};

/// Parses and validates a JSON config document. Throws ConfigError naming
/// the offending field.
RunConfig parse_config(const nlohmann::json &doc);
RunConfig load_config(const std::filesystem::path &path);

/// Builds the potential; power_law with exponent >= 3 yields the
/// hypothesis-violating family, which the certificate later rejects.
Potential make_potential(const PotentialSpec &spec);

nlohmann::ordered_json to_json(const LatticeParams &p);
nlohmann::ordered_json to_json(const ExistenceCertificate &c);
nlohmann::ordered_json to_json(const SolveReport &r);
nlohmann::ordered_json to_json(const DegreeReport &r);

/// Doubles printed with 17 significant digits.
std::string format_double(double x);

/// CSV with header `t,k,re,im`, one row per node in row-major order.
void write_field_csv(std::ostream &out, const LatticeField &phi);
/// CSV with header `k,re,im`.
void write_steady_csv(std::ostream &out, const std::vector<cplx> &u);

/// Reads either CSV dialect; a `k,re,im` file is read as a T = 1 field.
/// Throws DimensionMismatch unless every node of a T x K lattice appears
/// exactly once.
LatticeField read_field_csv(std::istream &in, int T, int K);

struct VerifyResult {
  double max_residual = 0.0;
  double mean_residual = 0.0;
  long argmax_t = 0;
  long argmax_k = 0;
  bool ok = false;
};

/// Pointwise residual of the lattice equation, from the field alone.
VerifyResult verify_field(const LatticeField &phi, const LatticeParams &params,
                          const Potential &g, double tolerance);

struct CommandContext {
  std::ostream &out;
  std::ostream &err;
  std::filesystem::path out_dir = ".";
};

int cmd_certify(const RunConfig &config, CommandContext &ctx);
int cmd_solve(const RunConfig &config, CommandContext &ctx);
int cmd_steady(const RunConfig &config, CommandContext &ctx);
int cmd_verify(const RunConfig &config, const std::filesystem::path &csv,
               CommandContext &ctx);
int cmd_degree(const RunConfig &config, CommandContext &ctx);

/// Runs a command by name, mapping errors to exit codes.
int run_command(const std::string &name, const std::filesystem::path &config,
                std::optional<std::uint64_t> seed,
                const std::filesystem::path &out_dir,
                const std::optional<std::filesystem::path> &solution,
                std::ostream &out, std::ostream &err);

} // namespace dnls::cli
