#include <string>
#include <vector>

#include <CLI11.hpp>

#include "negishi/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Arrow-Debreu equilibrium solver for finite-state exchange economies"};
  app.require_subcommand(1);

  std::string config_path;
  std::string output_json;
  std::string output_csv;
  auto* solve = app.add_subcommand("solve", "solve for equilibrium weights and prices");
  solve->add_option("config", config_path, "economy config (JSON)")->required();
  solve->add_option("-o,--output", output_json, "report file (default: stdout)");
  solve->add_option("--csv", output_csv, "per-state allocation CSV");

  std::string certificate_path;
  auto* verify = app.add_subcommand("verify", "verify a solve report against a config");
  verify->add_option("config", config_path, "economy config (JSON)")->required();
  verify->add_option("certificate", certificate_path, "solve report (JSON)")->required();

  std::vector<double> weights;
  auto* pareto = app.add_subcommand("pareto", "print the Pareto allocation for given weights");
  pareto->add_option("config", config_path, "economy config (JSON)")->required();
  pareto->add_option("--weights", weights, "comma-separated agent weights")
      ->required()
      ->delimiter(',');

  std::vector<double> grid{1e-6, 1e6, 97};
  auto* check = app.add_subcommand("check", "run utility validators and uniqueness checks");
  check->add_option("config", config_path, "economy config (JSON)")->required();
  check->add_option("--grid", grid, "lo,hi,n consumption grid")
      ->delimiter(',')
      ->expected(3);

  int grid_n = -1;
  int n_starts = 8;
  auto* scan = app.add_subcommand("scan", "hunt for multiple equilibria");
  scan->add_option("config", config_path, "economy config (JSON)")->required();
  scan->add_option("--grid-n", grid_n, "scan grid size (two-agent economies)");
  scan->add_option("--starts", n_starts, "number of solver starts");

  CLI11_PARSE(app, argc, argv);

  if (solve->parsed()) return negishi::cli::cmd_solve(config_path, output_json, output_csv);
  if (verify->parsed()) return negishi::cli::cmd_verify(config_path, certificate_path);
  if (pareto->parsed()) return negishi::cli::cmd_pareto(config_path, weights);
  if (check->parsed()) {
    return negishi::cli::cmd_check(config_path, grid[0], grid[1],
                                   static_cast<int>(grid[2]));
  }
  if (scan->parsed()) return negishi::cli::cmd_scan(config_path, grid_n, n_starts);
  return negishi::cli::kExitInputError;
}
