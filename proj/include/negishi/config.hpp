#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "negishi/equilibrium.hpp"

namespace negishi {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct UtilitySpec {
  std::string family;              // "crra" | "log"
  double gamma = 0.0;              // crra only
  std::vector<double> scale;       // optional per-state coefficients
};

struct AgentConfig {
  std::string id;
  UtilitySpec utility;
  std::vector<double> endowment;   // per-state, >= 0, at least one > 0
};

struct EconomyConfig {
  std::string schema_version = "1";
  std::vector<std::string> state_ids;
  std::vector<double> state_weights;
  std::vector<AgentConfig> agents;
  SolveOptions solver;
};

// Parses and structurally validates a config file. Throws ConfigError with a
// line-addressed message on parse errors and a path-addressed message on
// schema violations.
EconomyConfig load_economy_config(const std::string& path);
EconomyConfig economy_config_from_json(const nlohmann::json& j);

UtilityField build_utility(const UtilitySpec& spec, int n_states);
Economy build_economy(const EconomyConfig& config);

// Machine-readable solver report; key order and float formatting are stable,
// so identical inputs produce byte-identical files.
nlohmann::ordered_json solve_report_json(const SolveOutcome& outcome,
                                         const EconomyConfig& config);
void write_solve_report(const std::string& path, const SolveOutcome& outcome,
                        const EconomyConfig& config);
std::string allocation_csv(const SolveOutcome& outcome, const EconomyConfig& config);
void write_allocation_csv(const std::string& path, const SolveOutcome& outcome,
                          const EconomyConfig& config);

// Reads back the certificate part of a solver report, checking id alignment
// against the economy the config describes.
EquilibriumCertificate certificate_from_file(const std::string& path,
                                             const EconomyConfig& config);

}  // namespace negishi
