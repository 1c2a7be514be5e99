#pragma once

#include <string>
#include <vector>

namespace negishi::cli {

// Exit code vocabulary shared by all subcommands.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 1;
inline constexpr int kExitNoConvergence = 2;
inline constexpr int kExitVerificationFailed = 3;

// Verbosity from NEGISHI_LOG={error|info|debug}; defaults to error.
enum class LogLevel { error = 0, info = 1, debug = 2 };
LogLevel log_level();

// solve <config> [-o report.json] [--csv alloc.csv]; empty output_json means
// print the report to stdout, empty output_csv skips the CSV.
int cmd_solve(const std::string& config_path, const std::string& output_json,
              const std::string& output_csv);

int cmd_verify(const std::string& config_path, const std::string& certificate_path);

int cmd_pareto(const std::string& config_path, const std::vector<double>& weights);

int cmd_check(const std::string& config_path, double grid_lo, double grid_hi, int grid_n);

// grid_n < 0 selects the default: 1000 for two agents, otherwise no scan.
int cmd_scan(const std::string& config_path, int grid_n, int n_starts);

}  // namespace negishi::cli
