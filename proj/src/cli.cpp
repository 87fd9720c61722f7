#include "dnls/cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace dnls::cli {
namespace {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

const std::set<std::string> kTopLevelKeys = {
    "T",         "K",     "beta",      "epsilon",  "gamma",
    "potential", "shift_factor", "slack", "tolerance", "max_iter",
    "samples",   "n_starts", "seed",   "step0"};

const json &require(const json &doc, const std::string &key) {
  auto it = doc.find(key);
  if (it == doc.end())
    throw ConfigError("missing required field '" + key + "'");
  return *it;
}

double get_number(const json &v, const std::string &key) {
  if (!v.is_number())
    throw ConfigError("field '" + key + "' must be a number");
  return v.get<double>();
}

long get_integer(const json &v, const std::string &key) {
  if (!v.is_number_integer())
    throw ConfigError("field '" + key + "' must be an integer");
  return v.get<long>();
}

template <class T>
void optional_number(const json &doc, const std::string &key, T &target) {
  if (auto it = doc.find(key); it != doc.end()) {
    if constexpr (std::is_integral_v<T>) {
      const long v = get_integer(*it, key);
      if (v < 0)
        throw ConfigError("field '" + key + "' must be non-negative");
      target = static_cast<T>(v);
    } else {
      target = static_cast<T>(get_number(*it, key));
    }
  }
}

PotentialSpec parse_potential(const json &v) {
  if (!v.is_object())
    throw ConfigError("field 'potential' must be an object");
  for (const auto &[key, _] : v.items())
    if (key != "kind" && key != "coefficients" && key != "exponent")
      throw ConfigError("unknown field 'potential." + key + "'");
  PotentialSpec spec;
  const json &kind = require(v, "kind");
  if (!kind.is_string())
    throw ConfigError("field 'potential.kind' must be a string");
  spec.kind = kind.get<std::string>();
  if (spec.kind != "power_law" && spec.kind != "bounded" &&
      spec.kind != "constant" && spec.kind != "zero")
    throw ConfigError("field 'potential.kind' must be one of power_law, "
                      "bounded, constant, zero; got '" +
                      spec.kind + "'");
  if (auto it = v.find("coefficients"); it != v.end()) {
    if (!it->is_array())
      throw ConfigError("field 'potential.coefficients' must be an array of "
                        "[re, im] pairs");
    for (std::size_t i = 0; i < it->size(); ++i) {
      const json &pair = (*it)[i];
      const std::string name =
          "potential.coefficients[" + std::to_string(i) + "]";
      if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number() ||
          !pair[1].is_number())
        throw ConfigError("field '" + name + "' must be a [re, im] pair");
      spec.coefficients.emplace_back(pair[0].get<double>(),
                                     pair[1].get<double>());
    }
  }
  if (auto it = v.find("exponent"); it != v.end())
    spec.exponent = get_number(*it, "potential.exponent");
  if (spec.kind == "power_law" && !spec.exponent)
    throw ConfigError("missing required field 'potential.exponent'");
  if (spec.kind != "zero" && spec.coefficients.empty())
    throw ConfigError("field 'potential.coefficients' must be non-empty for "
                      "kind '" + spec.kind + "'");
  return spec;
}

std::string read_file(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in)
    throw ConfigError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path &path, const std::string &text) {
  std::filesystem::create_directories(path.parent_path().empty()
                                          ? std::filesystem::path(".")
                                          : path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw Error("cannot write '" + path.string() + "'");
  out << text;
}

ojson complex_json(cplx z) { return ojson::array({z.real(), z.imag()}); }

ExistenceCertificate certificate_for(const RunConfig &config,
                                     const ShiftedOperator &op,
                                     const Potential &g) {
  CertifyOptions co;
  co.slack = config.slack;
  co.samples = config.samples;
  co.seed = config.seed;
  return certify(op, g, co);
}

SolveOptions solve_options(const RunConfig &config) {
  SolveOptions so;
  so.tol = config.tolerance;
  so.max_iter = config.max_iter;
  so.step0 = config.step0;
  so.n_starts = config.n_starts;
  so.seed = config.seed;
  return so;
}

std::vector<std::string> split(const std::string &line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ','))
    out.push_back(cell);
  return out;
}

double parse_double(const std::string &s, std::size_t line) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception &) {
    used = 0;
  }
  if (used == 0 || used != s.size())
    throw DimensionMismatch("line " + std::to_string(line) +
                            ": cannot parse number '" + s + "'");
  return v;
}

long parse_index(const std::string &s, std::size_t line) {
  const double v = parse_double(s, line);
  if (v != std::floor(v))
    throw DimensionMismatch("line " + std::to_string(line) +
                            ": index must be an integer");
  return static_cast<long>(v);
}

} // namespace

RunConfig parse_config(const json &doc) {
  if (!doc.is_object())
    throw ConfigError("config must be a JSON object");
  for (const auto &[key, _] : doc.items())
    if (!kTopLevelKeys.contains(key))
      throw ConfigError("unknown field '" + key + "'");

  RunConfig c;
  const long T = get_integer(require(doc, "T"), "T");
  const long K = get_integer(require(doc, "K"), "K");
  if (T < 1)
    throw ConfigError("field 'T' must be >= 1");
  if (K < 2)
    throw ConfigError("field 'K' must be >= 2");
  c.params.T = static_cast<int>(T);
  c.params.K = static_cast<int>(K);
  c.params.beta = get_number(require(doc, "beta"), "beta");
  c.params.epsilon = get_number(require(doc, "epsilon"), "epsilon");
  c.params.gamma = get_number(require(doc, "gamma"), "gamma");
  if (!(c.params.beta > 0.0))
    throw ConfigError("field 'beta' must be positive");
  if (!(c.params.epsilon > 0.0))
    throw ConfigError("field 'epsilon' must be positive");
  if (c.params.gamma == 0.0)
    throw ConfigError("field 'gamma' must be nonzero");
  c.potential = parse_potential(require(doc, "potential"));

  optional_number(doc, "shift_factor", c.shift_factor);
  optional_number(doc, "slack", c.slack);
  optional_number(doc, "tolerance", c.tolerance);
  optional_number(doc, "max_iter", c.max_iter);
  optional_number(doc, "samples", c.samples);
  optional_number(doc, "n_starts", c.n_starts);
  optional_number(doc, "seed", c.seed);
  optional_number(doc, "step0", c.step0);
  if (!(c.shift_factor > 1.0))
    throw ConfigError("field 'shift_factor' must exceed 1");
  if (!(c.slack >= 0.0 && c.slack < 1.0))
    throw ConfigError("field 'slack' must lie in [0, 1)");
  if (!(c.tolerance > 0.0))
    throw ConfigError("field 'tolerance' must be positive");
  if (c.n_starts < 1)
    throw ConfigError("field 'n_starts' must be >= 1");
  if (!(c.step0 > 0.0 && c.step0 <= 1.0))
    throw ConfigError("field 'step0' must lie in (0, 1]");

  const auto period = c.potential.kind == "zero"
                          ? 1
                          : static_cast<long>(c.potential.coefficients.size());
  if (c.params.T % period != 0)
    throw ConfigError("field 'potential.coefficients' has period " +
                      std::to_string(period) + ", which does not divide T = " +
                      std::to_string(c.params.T));
  return c;
}

RunConfig load_config(const std::filesystem::path &path) {
  json doc;
  try {
    doc = json::parse(read_file(path));
  } catch (const json::parse_error &e) {
    throw ConfigError("malformed JSON in '" + path.string() + "': " +
                      e.what());
  }
  return parse_config(doc);
}

Potential make_potential(const PotentialSpec &spec) {
  if (spec.kind == "zero")
    return zero_potential();
  if (spec.kind == "bounded")
    return bounded_potential(spec.coefficients);
  if (spec.kind == "constant")
    return constant_potential(spec.coefficients);
  if (spec.kind == "power_law") {
    const double r = spec.exponent.value();
    if (r >= 3.0)
      return growth_violator(spec.coefficients, r);
    return power_law(spec.coefficients, r);
  }
  throw ConfigError("unknown potential kind '" + spec.kind + "'");
}

ojson to_json(const LatticeParams &p) {
  return ojson{{"T", p.T},
               {"K", p.K},
               {"beta", p.beta},
               {"epsilon", p.epsilon},
               {"gamma", p.gamma}};
}

ojson to_json(const ExistenceCertificate &c) {
  const auto &e = c.evidence;
  return ojson{
      {"s", c.s},
      {"norm_L", c.norm_L},
      {"norm_A", c.norm_A},
      {"norm_A_inv", c.norm_A_inv},
      {"c", c.c},
      {"Rstar", c.Rstar},
      {"M", c.M},
      {"B", c.B},
      {"C", c.C},
      {"D", c.D},
      {"R", c.R},
      {"slack", c.slack},
      {"margin", c.margin},
      {"rigor", std::string(to_string(c.rigor))},
      {"evidence",
       ojson{{"count", e.count},
             {"min_gap", e.count > 0 ? ojson(e.min_gap) : ojson(nullptr)},
             {"argmin_index", e.argmin_index},
             {"argmin_hash", e.argmin_hash},
             {"upper_bound_violations", e.upper_bound_violations},
             {"lower_bound_violations", e.lower_bound_violations}}},
      {"valid", c.valid()}};
}

ojson to_json(const SolveReport &r) {
  ojson path = ojson::array();
  for (const auto &[tau, norm] : r.path)
    path.push_back(ojson::array({tau, norm}));
  return ojson{{"status", std::string(to_string(r.status))},
               {"residual_direct", r.residual_direct},
               {"residual_Q", r.residual_Q},
               {"solution_norm", sup_norm(r.solution)},
               {"newton_iterations", r.newton_iterations},
               {"homotopy_steps", r.homotopy_steps},
               {"path", path}};
}

ojson to_json(const DegreeReport &r) {
  auto zeros = [](const std::vector<LocatedZero> &zs) {
    ojson arr = ojson::array();
    for (const auto &z : zs) {
      ojson field = ojson::array();
      for (cplx v : z.field.values())
        field.push_back(complex_json(v));
      arr.push_back(ojson{{"norm", sup_norm(z.field)},
                          {"residual", z.residual},
                          {"det_sign", z.det_sign},
                          {"log10_relative_det", z.log10_relative_det},
                          {"field", field}});
    }
    return arr;
  };
  return ojson{{"target", std::string(to_string(r.target))},
               {"radius", r.radius},
               {"degree_estimate", r.degree_estimate},
               {"parity_ok", r.parity_ok},
               {"perturbation", r.perturbation},
               {"degenerate_excluded", r.degenerate_excluded},
               {"completeness", std::string(r.completeness)},
               {"zeros", zeros(r.zeros)},
               {"counted", zeros(r.counted)}};
}

std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_field_csv(std::ostream &out, const LatticeField &phi) {
  out << "t,k,re,im\n";
  for (long t = 0; t < phi.T(); ++t)
    for (long k = 0; k < phi.K(); ++k) {
      const cplx v = phi(t, k);
      out << t << ',' << k << ',' << format_double(v.real()) << ','
          << format_double(v.imag()) << '\n';
    }
}

void write_steady_csv(std::ostream &out, const std::vector<cplx> &u) {
  out << "k,re,im\n";
  for (std::size_t k = 0; k < u.size(); ++k)
    out << k << ',' << format_double(u[k].real()) << ','
        << format_double(u[k].imag()) << '\n';
}

LatticeField read_field_csv(std::istream &in, int T, int K) {
  std::string line;
  if (!std::getline(in, line))
    throw DimensionMismatch("solution file is empty");
  if (!line.empty() && line.back() == '\r')
    line.pop_back();
  bool steady = false;
  if (line == "k,re,im")
    steady = true;
  else if (line != "t,k,re,im")
    throw DimensionMismatch("unrecognized CSV header '" + line + "'");
  if (steady)
    T = 1;

  LatticeField phi(T, K);
  std::vector<bool> seen(phi.size(), false);
  std::size_t lineno = 1;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r')
      line.pop_back();
    if (line.empty())
      continue;
    const auto cells = split(line);
    if (cells.size() != (steady ? 3u : 4u))
      throw DimensionMismatch("line " + std::to_string(lineno) +
                              ": wrong number of columns");
    const long t = steady ? 0 : parse_index(cells[0], lineno);
    const long k = parse_index(cells[steady ? 0 : 1], lineno);
    if (t < 0 || t >= T || k < 0 || k >= K)
      throw DimensionMismatch("line " + std::to_string(lineno) + ": node (" +
                              std::to_string(t) + "," + std::to_string(k) +
                              ") outside the " + std::to_string(T) + "x" +
                              std::to_string(K) + " lattice");
    const std::size_t idx = phi.index(t, k);
    if (seen[idx])
      throw DimensionMismatch("line " + std::to_string(lineno) +
                              ": duplicate node");
    seen[idx] = true;
    phi[idx] = {parse_double(cells[steady ? 1 : 2], lineno),
                parse_double(cells[steady ? 2 : 3], lineno)};
    ++rows;
  }
  if (rows != phi.size())
    throw DimensionMismatch("solution file has " + std::to_string(rows) +
                            " rows, expected " + std::to_string(phi.size()));
  return phi;
}

VerifyResult verify_field(const LatticeField &phi, const LatticeParams &params,
                          const Potential &g, double tolerance) {
  // Written out node by node so that the check shares no code with the
  // operator layer.
  const cplx i{0.0, 1.0};
  VerifyResult v;
  double sum = 0.0;
  for (long t = 0; t < phi.T(); ++t)
    for (long k = 0; k < phi.K(); ++k) {
      const cplx u = phi(t, k);
      const cplx lhs =
          i * params.beta * (phi(t + 1, k) - phi(t - 1, k)) +
          params.gamma * std::norm(u) * u +
          params.epsilon * (phi(t, k + 1) - 2.0 * u + phi(t, k - 1));
      const double r = std::abs(lhs - g.evaluate(t, u));
      sum += r;
      if (r > v.max_residual || (t == 0 && k == 0)) {
        v.max_residual = r;
        v.argmax_t = t;
        v.argmax_k = k;
      }
    }
  v.mean_residual = sum / static_cast<double>(phi.size());
  v.ok = std::isfinite(v.max_residual) && v.max_residual <= tolerance;
  return v;
}

int cmd_certify(const RunConfig &config, CommandContext &ctx) {
  const Potential g = make_potential(config.potential);
  const ShiftedOperator op = build_shifted(config.params, config.shift_factor);
  const ExistenceCertificate cert = certificate_for(config, op, g);
  ojson doc{{"command", "certify"},
            {"params", to_json(config.params)},
            {"potential", config.potential.kind},
            {"seed", config.seed},
            {"certificate", to_json(cert)},
            {"valid", cert.valid()}};
  ctx.out << doc.dump(2) << '\n';
  return cert.valid() ? kOk : kCertificateError;
}

int cmd_solve(const RunConfig &config, CommandContext &ctx) {
  const Potential g = make_potential(config.potential);
  const ShiftedOperator op = build_shifted(config.params, config.shift_factor);
  const ExistenceCertificate cert = certificate_for(config, op, g);
  const SolveReport report = solve(op, g, cert, solve_options(config));

  std::ostringstream csv;
  write_field_csv(csv, report.solution);
  write_text(ctx.out_dir / "solution.csv", csv.str());

  ojson doc{{"command", "solve"},
            {"params", to_json(config.params)},
            {"potential", config.potential.kind},
            {"seed", config.seed},
            {"certificate", to_json(cert)},
            {"report", to_json(report)},
            {"solution_file", "solution.csv"}};
  const std::string text = doc.dump(2) + "\n";
  write_text(ctx.out_dir / "solve_report.json", text);
  ctx.out << text;
  return report.converged() ? kOk : kSolverError;
}

int cmd_steady(const RunConfig &config, CommandContext &ctx) {
  const Potential h = make_potential(config.potential);
  if (h.period() != 1)
    throw ConfigError("steady needs a time-independent potential (one "
                      "coefficient)");
  SteadyStateOptions so;
  so.shift_factor = config.shift_factor;
  so.certify.slack = config.slack;
  so.certify.samples = config.samples;
  so.certify.seed = config.seed;
  so.solve = solve_options(config);
  const SteadyStateResult res =
      steady_state_solve(config.params.K, config.params.epsilon,
                         config.params.gamma, h, so);

  std::ostringstream csv;
  write_steady_csv(csv, res.u);
  write_text(ctx.out_dir / "steady.csv", csv.str());

  LatticeParams steady = config.params;
  steady.T = 1;
  ojson doc{{"command", "steady"},
            {"params", to_json(steady)},
            {"potential", config.potential.kind},
            {"seed", config.seed},
            {"certificate", to_json(res.certificate)},
            {"report", to_json(res.report)},
            {"solution_file", "steady.csv"}};
  const std::string text = doc.dump(2) + "\n";
  write_text(ctx.out_dir / "steady_report.json", text);
  ctx.out << text;
  return res.report.converged() ? kOk : kSolverError;
}

int cmd_verify(const RunConfig &config, const std::filesystem::path &csv,
               CommandContext &ctx) {
  std::ifstream in(csv);
  if (!in)
    throw DimensionMismatch("cannot open solution file '" + csv.string() +
                            "'");
  const LatticeField phi = read_field_csv(in, config.params.T, config.params.K);
  LatticeParams params = config.params;
  params.T = phi.T();
  const Potential g = make_potential(config.potential);
  if (!g.compatible_with(params.T))
    throw DimensionMismatch("potential period does not divide the file's T");
  const VerifyResult v = verify_field(phi, params, g, config.tolerance);
  ojson doc{{"command", "verify"},
            {"params", to_json(params)},
            {"max_residual", v.max_residual},
            {"mean_residual", v.mean_residual},
            {"argmax", ojson{{"t", v.argmax_t}, {"k", v.argmax_k}}},
            {"tolerance", config.tolerance},
            {"ok", v.ok}};
  ctx.out << doc.dump(2) << '\n';
  return v.ok ? kOk : kSolverError;
}

int cmd_degree(const RunConfig &config, CommandContext &ctx) {
  const long real_dim = 2L * static_cast<long>(config.params.size());
  if (real_dim > 64)
    throw DimensionTooLarge("degree estimation is limited to 2TK <= 64, got " +
                            std::to_string(real_dim));
  const Potential g = make_potential(config.potential);
  const ShiftedOperator op = build_shifted(config.params, config.shift_factor);
  const ExistenceCertificate cert = certificate_for(config, op, g);
  if (!cert.valid()) {
    ctx.out << ojson{{"command", "degree"}, {"certificate", to_json(cert)}}
                   .dump(2)
            << '\n';
    return kCertificateError;
  }
  DegreeOptions dopt;
  dopt.n_starts = config.n_starts;
  dopt.seed = config.seed;
  dopt.tol = config.tolerance;
  dopt.max_iter = config.max_iter;
  const DegreeReport s = estimate_degree(DegreeTarget::S_map, op, g, cert, dopt);
  const DegreeReport q = estimate_degree(DegreeTarget::Q_map, op, g, cert, dopt);
  const bool agree = s.degree_estimate == q.degree_estimate;
  const bool ok = s.parity_ok && agree;
  ojson doc{{"command", "degree"},
            {"params", to_json(config.params)},
            {"potential", config.potential.kind},
            {"seed", config.seed},
            {"certificate", to_json(cert)},
            {"S_map", to_json(s)},
            {"Q_map", to_json(q)},
            {"estimates_agree", agree},
            {"status", ok ? "OK" : "INCOMPLETE-ENUMERATION"}};
  ctx.out << doc.dump(2) << '\n';
  return ok ? kOk : kDegreeError;
}

int run_command(const std::string &name, const std::filesystem::path &config,
                std::optional<std::uint64_t> seed,
                const std::filesystem::path &out_dir,
                const std::optional<std::filesystem::path> &solution,
                std::ostream &out, std::ostream &err) {
  CommandContext ctx{out, err, out_dir};
  try {
    RunConfig c = load_config(config);
    if (seed)
      c.seed = *seed;
    if (name == "certify")
      return cmd_certify(c, ctx);
    if (name == "solve")
      return cmd_solve(c, ctx);
    if (name == "steady")
      return cmd_steady(c, ctx);
    if (name == "degree")
      return cmd_degree(c, ctx);
    if (name == "verify") {
      if (!solution)
        throw ConfigError("verify needs --solution <csv>");
      return cmd_verify(c, *solution, ctx);
    }
    throw ConfigError("unknown command '" + name + "'");
  } catch (const NoThresholdFound &e) {
    err << "NoThresholdFound: " << e.what() << '\n';
    return kCertificateError;
  } catch (const ConfigError &e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const DimensionMismatch &e) {
    err << "DimensionMismatch: " << e.what() << '\n';
    return kConfigError;
  } catch (const DimensionTooLarge &e) {
    err << "DimensionTooLarge: " << e.what() << '\n';
    return kConfigError;
  } catch (const InvalidExponent &e) {
    err << "InvalidExponent: " << e.what() << '\n';
    return kConfigError;
  } catch (const Error &e) {
    err << "error: " << e.what() << '\n';
    return kSolverError;
  }
}

} // namespace dnls::cli
