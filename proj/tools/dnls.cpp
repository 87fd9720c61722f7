#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "dnls/cli.hpp"

int main(int argc, char **argv) {
  CLI::App app{"Periodic solutions of the discrete nonlinear Schroedinger "
               "equation: certificates, solver, degree estimates"};
  app.require_subcommand(1);

  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out_dir = ".";
  std::optional<std::string> solution;

  auto add_common = [&](CLI::App *cmd) {
    cmd->add_option("--config", config, "JSON run configuration")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--seed", seed, "Override the config seed");
    cmd->add_option("--out", out_dir, "Output directory for CSV/JSON files");
  };

  add_common(app.add_subcommand("certify", "Compute the existence certificate"));
  add_common(app.add_subcommand("solve", "Find a (T,K)-periodic solution"));
  add_common(app.add_subcommand("steady", "Find a steady-state solution (T = 1)"));
  add_common(app.add_subcommand("degree", "Estimate deg(S) and deg(Q) on the certified ball"));
  auto *verify = app.add_subcommand("verify", "Check a solution CSV against the equation");
  add_common(verify);
  verify->add_option("--solution", solution, "Solution CSV to check")
      ->required()
      ->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : dnls::cli::kConfigError;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  std::optional<std::filesystem::path> sol;
  if (solution)
    sol = *solution;
  return dnls::cli::run_command(name, config, seed, out_dir, sol, std::cout,
                                std::cerr);
}
