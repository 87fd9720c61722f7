#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "dnls/cli.hpp"
#include "support.hpp"

using namespace dnls;
using namespace dnls::cli;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const fs::path kConfigs = DNLS_CONFIG_DIR;
const fs::path kData = DNLS_TEST_DATA;

json base_config() {
  return json::parse(R"({
    "T": 4, "K": 4, "beta": 1.0, "epsilon": 1.0, "gamma": 1.0,
    "potential": {"kind": "power_law", "coefficients": [[1.0, 0.0]],
                  "exponent": 2.0}
  })");
}

std::string config_error(const json &doc) {
  try {
    parse_config(doc);
  } catch (const ConfigError &e) {
    return e.what();
  }
  return "";
}

fs::path scratch(const std::string &name) {
  const fs::path dir = fs::temp_directory_path() / "dnls_test_cli" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path &p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(const std::string &cmd, const fs::path &config, const fs::path &out_dir,
        std::optional<fs::path> solution = std::nullopt,
        std::optional<std::uint64_t> seed = std::nullopt) {
  std::ostringstream out, err;
  const int code = run_command(cmd, config, seed, out_dir, solution, out, err);
  return {code, out.str(), err.str()};
}

fs::path write_config(const fs::path &dir, const json &doc) {
  const fs::path p = dir / "config.json";
  std::ofstream(p) << doc.dump();
  return p;
}

} // namespace

TEST_CASE("config parsing") {
  const RunConfig c = parse_config(base_config());
  CHECK(c.params.T == 4);
  CHECK(c.shift_factor == 1.5);
  CHECK(c.slack == 0.1);
  CHECK(c.tolerance == 1e-10);
  CHECK(c.max_iter == 100);
  CHECK(c.samples == 10000);
  CHECK(c.n_starts == 32);
  CHECK(c.seed == 0);
  CHECK(c.potential.exponent == 2.0);

  json d = base_config();
  d["K"] = 1;
  CHECK(config_error(d).find("K") != std::string::npos);
  d = base_config();
  d.erase("beta");
  CHECK(config_error(d).find("beta") != std::string::npos);
  d = base_config();
  d["gamma"] = "one";
  CHECK(config_error(d).find("gamma") != std::string::npos);
  d = base_config();
  d["colour"] = 1;
  CHECK(config_error(d).find("colour") != std::string::npos);
  d = base_config();
  d["potential"]["kind"] = "quartic";
  CHECK(config_error(d).find("potential.kind") != std::string::npos);
  d = base_config();
  d["potential"]["coefficients"] = json::parse("[[1.0]]");
  CHECK(config_error(d).find("coefficients[0]") != std::string::npos);
  d = base_config();
  d["potential"]["coefficients"] = json::parse("[[1,0],[1,0],[1,0]]");
  CHECK(config_error(d).find("period") != std::string::npos);
  d = base_config();
  d["seed"] = -3;
  CHECK(config_error(d).find("seed") != std::string::npos);

  const fs::path dir = scratch("parse");
  std::ofstream(dir / "bad.json") << "{ \"T\": ";
  CHECK_THROWS_AS(load_config(dir / "bad.json"), ConfigError);
}

TEST_CASE("potential construction") {
  PotentialSpec spec{"power_law", {{1.0, 0.0}}, 3.0};
  CHECK(make_potential(spec).kind() == "growth_violator");
  spec.exponent = 2.0;
  CHECK(make_potential(spec).kind() == "power_law");
  CHECK(make_potential({"zero", {}, std::nullopt}).kind() == "zero");
}

TEST_CASE("CSV round trip is lossless") {
  Rng rng(51);
  const LatticeField phi = testing::random_field(rng, 3, 4, 1e3);
  std::stringstream ss;
  write_field_csv(ss, phi);
  CHECK(ss.str().rfind("t,k,re,im\n", 0) == 0);
  CHECK(read_field_csv(ss, 3, 4) == phi);

  std::stringstream steady;
  write_steady_csv(steady, {{1.0 / 3.0, -0.1}, {2.0, 0.0}});
  CHECK(steady.str() == "k,re,im\n0,0.33333333333333331,-0.10000000000000001\n"
                        "1,2,0\n");
  const LatticeField u = read_field_csv(steady, 1, 2);
  CHECK(u.T() == 1);
  CHECK(u[0] == cplx{1.0 / 3.0, -0.1});

  std::stringstream missing("t,k,re,im\n0,0,1,0\n");
  CHECK_THROWS_AS(read_field_csv(missing, 1, 2), DimensionMismatch);
  std::stringstream twice("k,re,im\n0,1,0\n0,1,0\n");
  CHECK_THROWS_AS(read_field_csv(twice, 1, 2), DimensionMismatch);
}

TEST_CASE("independent verification") {
  const LatticeParams p{1, 5, 1, 1, 1};
  const Potential h = constant_potential({8.0});
  const VerifyResult ok = verify_field(LatticeField::constant(1, 5, 2.0), p, h,
                                       1e-10);
  CHECK(ok.ok);
  CHECK(ok.max_residual == 0.0);

  LatticeField bumped = LatticeField::constant(1, 5, 2.0);
  bumped(0, 3) += 0.1;
  const VerifyResult bad = verify_field(bumped, p, h, 1e-10);
  CHECK_FALSE(bad.ok);
  CHECK(bad.argmax_k == 3);
  CHECK(bad.max_residual > bad.mean_residual);
}

TEST_CASE("certify command") {
  const fs::path dir = scratch("certify");
  const Run r = run("certify", kConfigs / "power_law_4x4.json", dir);
  CHECK(r.code == kOk);
  const json doc = json::parse(r.out);
  CHECK(doc["valid"] == true);
  CHECK(doc["certificate"]["s"] == 9.0);
  CHECK(doc["certificate"]["evidence"]["count"] == 10000);
  CHECK(doc["certificate"]["evidence"]["min_gap"].get<double>() > 0.0);

  const Run violator = run("certify", kData / "violator.json", dir);
  CHECK(violator.code == kCertificateError);
  CHECK(violator.err.find("NoThresholdFound") != std::string::npos);

  const Run malformed = run("certify", kData / "malformed.json", dir);
  CHECK(malformed.code == kConfigError);
  const Run bad_field = run("certify", kData / "bad_field.json", dir);
  CHECK(bad_field.code == kConfigError);
  CHECK(bad_field.err.find("K") != std::string::npos);
}

TEST_CASE("solve and verify round trip") {
  const fs::path dir = scratch("solve");
  const Run r = run("solve", kConfigs / "forced_4x4.json", dir);
  REQUIRE(r.code == kOk);
  const json doc = json::parse(slurp(dir / "solve_report.json"));
  CHECK(doc["report"]["status"] == "converged");
  CHECK(doc["report"]["residual_direct"].get<double>() <= 1e-10);

  const Run v = run("verify", kConfigs / "forced_4x4.json", dir,
                    dir / "solution.csv");
  CHECK(v.code == kOk);

  // One entry nudged by 0.1 is caught and localized.
  std::ifstream in(dir / "solution.csv");
  LatticeField phi = read_field_csv(in, 4, 4);
  phi(2, 1) += 0.1;
  std::ofstream(dir / "nudged.csv") << [&] {
    std::ostringstream s;
    write_field_csv(s, phi);
    return s.str();
  }();
  const Run nudged =
      run("verify", kConfigs / "forced_4x4.json", dir, dir / "nudged.csv");
  CHECK(nudged.code == kSolverError);
  const json nd = json::parse(nudged.out);
  CHECK(nd["ok"] == false);
  CHECK(nd["max_residual"].get<double>() > 0.01);
}

TEST_CASE("zero forcing solve writes zero rows") {
  const fs::path dir = scratch("solve_zero");
  json d = base_config();
  d["potential"] = json::parse(R"({"kind": "zero"})");
  d["samples"] = 500;
  const fs::path cfg = write_config(dir, d);
  REQUIRE(run("solve", cfg, dir).code == kOk);
  std::ifstream in(dir / "solution.csv");
  const LatticeField phi = read_field_csv(in, 4, 4);
  CHECK(sup_norm(phi) == 0.0);
  CHECK(run("verify", cfg, dir, dir / "solution.csv").code == kOk);
}

TEST_CASE("steady command") {
  const fs::path dir = scratch("steady");
  const Run r = run("steady", kConfigs / "steady_constant.json", dir);
  REQUIRE(r.code == kOk);
  CHECK(run("verify", kConfigs / "steady_constant.json", dir,
            dir / "steady.csv")
            .code == kOk);
  CHECK(run("verify", kConfigs / "steady_constant.json", dir,
            kData / "root_two.csv")
            .code == kOk);

  json d = base_config();
  d["T"] = 1;
  d["K"] = 2;
  d["potential"] = json::parse(R"({"kind": "constant",
                                   "coefficients": [[8, 0], [8, 0]]})");
  d["T"] = 2;
  CHECK(run("steady", write_config(dir, d), dir).code == kConfigError);
}

TEST_CASE("degree command") {
  const fs::path dir = scratch("degree");
  const Run r = run("degree", kConfigs / "zero_1x2.json", dir);
  CHECK(r.code == kOk);
  const json doc = json::parse(r.out);
  CHECK(doc["S_map"]["degree_estimate"] == 1);
  CHECK(doc["Q_map"]["degree_estimate"] == 1);
  CHECK(doc["status"] == "OK");
  CHECK(run("degree", kData / "too_large.json", dir).code == kConfigError);
}

TEST_CASE("seed override changes sampled output only through the seed") {
  const fs::path dir = scratch("seed");
  const Run a = run("certify", kConfigs / "power_law_4x4.json", dir, {}, 11);
  const Run b = run("certify", kConfigs / "power_law_4x4.json", dir, {}, 11);
  const Run c = run("certify", kConfigs / "power_law_4x4.json", dir, {}, 12);
  CHECK(a.out == b.out);
  CHECK(a.out != c.out);
  CHECK(json::parse(a.out)["seed"] == 11);
}
