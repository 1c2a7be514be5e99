#include "negishi/cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <iostream>

#include "negishi/config.hpp"

namespace negishi::cli {

namespace {

void log(LogLevel level, const std::string& message) {
  if (static_cast<int>(level) <= static_cast<int>(log_level())) {
    std::cerr << "negishi: " << message << "\n";
  }
}

std::string real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string short_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

struct LoadedEconomy {
  EconomyConfig config;
  Economy economy;
};

// nullopt on failure, after printing the reason; callers exit with 1.
std::optional<LoadedEconomy> load(const std::string& config_path) {
  try {
    EconomyConfig config = load_economy_config(config_path);
    Economy economy = build_economy(config);
    return LoadedEconomy{std::move(config), std::move(economy)};
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << config_path << ": " << e.what() << "\n";
  }
  return std::nullopt;
}

}  // namespace

LogLevel log_level() {
  const char* env = std::getenv("NEGISHI_LOG");
  if (env == nullptr) return LogLevel::error;
  if (std::strcmp(env, "debug") == 0) return LogLevel::debug;
  if (std::strcmp(env, "info") == 0) return LogLevel::info;
  return LogLevel::error;
}

int cmd_solve(const std::string& config_path, const std::string& output_json,
              const std::string& output_csv) {
  const auto loaded = load(config_path);
  if (!loaded) return kExitInputError;

  SolveOutcome outcome;
  try {
    outcome = solve(loaded->economy, loaded->config.solver);
  } catch (const NumericalError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNoConvergence;
  }

  for (const auto& line : outcome.method_trace) log(LogLevel::info, line);
  if (log_level() >= LogLevel::debug) {
    for (size_t i = 0; i < outcome.residual_trace.size(); ++i) {
      log(LogLevel::debug, "iter " + std::to_string(i) + " rel=" +
                               short_real(outcome.residual_trace[i]));
    }
  }

  try {
    if (output_json.empty()) {
      std::cout << solve_report_json(outcome, loaded->config).dump(2) << "\n";
    } else {
      write_solve_report(output_json, outcome, loaded->config);
    }
    if (!output_csv.empty()) {
      write_allocation_csv(output_csv, outcome, loaded->config);
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  }

  if (!outcome.converged()) {
    std::cerr << "error: no convergence (best residual " << short_real(outcome.residual)
              << "); report carries the best iterate\n";
    return kExitNoConvergence;
  }
  log(LogLevel::info, "converged, residual " + short_real(outcome.residual));
  return kExitOk;
}

int cmd_verify(const std::string& config_path, const std::string& certificate_path) {
  const auto loaded = load(config_path);
  if (!loaded) return kExitInputError;

  EquilibriumCertificate cert;
  try {
    cert = certificate_from_file(certificate_path, loaded->config);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  }

  VerificationReport report;
  try {
    report = verify(cert, loaded->economy);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  }

  for (const auto& check : report.checks) {
    std::cout << (check.pass ? "[PASS] " : "[FAIL] ") << check.name
              << " magnitude=" << short_real(check.magnitude);
    if (std::isfinite(check.threshold)) {
      std::cout << " threshold=" << short_real(check.threshold);
    }
    std::cout << "\n";
  }
  if (!report.all_pass()) {
    for (const auto& check : report.checks) {
      if (!check.pass) {
        std::cerr << "verification failed: " << check.name << "\n";
      }
    }
    return kExitVerificationFailed;
  }
  return kExitOk;
}

int cmd_pareto(const std::string& config_path, const std::vector<double>& weights) {
  const auto loaded = load(config_path);
  if (!loaded) return kExitInputError;

  if (weights.size() != loaded->config.agents.size()) {
    std::cerr << "error: expected " << loaded->config.agents.size()
              << " weights, got " << weights.size() << "\n";
    return kExitInputError;
  }
  Vec w(static_cast<Eigen::Index>(weights.size()));
  for (size_t i = 0; i < weights.size(); ++i) w[static_cast<Eigen::Index>(i)] = weights[i];
  if (!is_valid_weights(w)) {
    std::cerr << "error: weights must be non-negative with at least one positive entry\n";
    return kExitInputError;
  }

  ParetoAllocation pareto;
  try {
    pareto = pareto_allocation(loaded->economy, w);
  } catch (const NumericalError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNoConvergence;
  }

  std::string csv = "state,u_c";
  for (const auto& a : loaded->config.agents) csv += "," + a.id;
  csv += "\n";
  for (int s = 0; s < loaded->economy.num_states(); ++s) {
    csv += loaded->config.state_ids[static_cast<size_t>(s)];
    csv += "," + real(pareto.state_price[s]);
    for (int m = 0; m < loaded->economy.num_agents(); ++m) {
      csv += "," + real(pareto.allocation(m, s));
    }
    csv += "\n";
  }
  std::cout << csv;
  return kExitOk;
}

int cmd_check(const std::string& config_path, double grid_lo, double grid_hi, int grid_n) {
  const auto loaded = load(config_path);
  if (!loaded) return kExitInputError;

  Vec grid;
  try {
    grid = log_spaced_grid(grid_lo, grid_hi, grid_n);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: --grid: " << e.what() << "\n";
    return kExitInputError;
  }

  const Economy& eco = loaded->economy;
  for (int m = 0; m < eco.num_agents(); ++m) {
    const auto& agent = loaded->config.agents[static_cast<size_t>(m)];
    const UtilityField& field = eco.agent(m);
    const FieldValidationReport validation = validate_field(field, grid);
    const ConcavityBoundReport concavity = concavity_bound_check(field, grid);
    const auto monotone = marginal_times_c_monotone(field, grid);

    bool inc = true, dec = true, in0 = true, inf_ok = true, inv = true, mono = true;
    double inv_err = 0.0;
    bool u0_minus_inf = false;
    for (const auto& st : validation.states) {
      inc = inc && st.u_increasing;
      dec = dec && st.du_decreasing;
      in0 = in0 && st.inada_at_zero;
      inf_ok = inf_ok && st.inada_at_infinity;
      inv = inv && st.inverse_consistent;
      inv_err = std::max(inv_err, st.inverse_max_rel_error);
      u0_minus_inf = u0_minus_inf || st.u_at_zero_is_minus_inf;
    }
    for (bool b : monotone) mono = mono && b;

    std::cout << "agent " << agent.id << " (" << field.family();
    if (field.family() == "crra") std::cout << " gamma=" << short_real(field.gamma());
    std::cout << "):\n";
    std::cout << "  u strictly increasing:    " << (inc ? "pass" : "FAIL") << "\n";
    std::cout << "  u' strictly decreasing:   " << (dec ? "pass" : "FAIL") << "\n";
    std::cout << "  Inada at zero:            " << (in0 ? "pass" : "FAIL") << "\n";
    std::cout << "  Inada at infinity:        " << (inf_ok ? "pass" : "FAIL") << "\n";
    std::cout << "  inverse marginal:         " << (inv ? "pass" : "FAIL")
              << " (max rel err " << short_real(inv_err) << ")\n";
    std::cout << "  concavity bound:          " << (concavity.pass ? "pass" : "FAIL") << "\n";
    std::cout << "  c*u'(c) non-decreasing:   " << (mono ? "yes" : "no") << "\n";
    if (u0_minus_inf) std::cout << "  u(0) = -inf\n";
  }

  const UniquenessReport uniq = check_uniqueness_preconditions(eco, grid);
  std::cout << "uniqueness: ";
  if (uniq.unique_guaranteed) {
    std::cout << "guaranteed (at most one agent may violate the "
                 "gross-substitute condition";
    if (!uniq.violators.empty()) {
      std::cout << "; violator: "
                << loaded->config.agents[static_cast<size_t>(uniq.violators[0])].id;
    }
    std::cout << ")\n";
  } else {
    std::cout << "no guarantee (violators:";
    for (int m : uniq.violators) {
      std::cout << " " << loaded->config.agents[static_cast<size_t>(m)].id;
    }
    std::cout << ")\n";
  }

  const Vec uniform = Vec::Constant(eco.num_agents(), 1.0 / eco.num_agents());
  try {
    const IntegrabilityReport integ = integrability_report(eco, uniform);
    std::cout << "integrability at uniform weights: equal-split bound "
              << short_real(integ.equal_split_bound)
              << (integ.overflow_risk ? " [OVERFLOW RISK]" : "") << "\n";
    for (int m = 0; m < eco.num_agents(); ++m) {
      std::cout << "  " << loaded->config.agents[static_cast<size_t>(m)].id
                << ": E[|U(pi)|]=" << short_real(integ.abs_utility[m])
                << " E[U'(pi)Lambda]=" << short_real(integ.marginal_value_of_endowment[m])
                << "\n";
    }
    for (const auto& note : integ.notes) std::cout << "  note: " << note << "\n";
  } catch (const std::exception& e) {
    std::cout << "integrability report unavailable: " << e.what() << "\n";
  }
  return kExitOk;
}

int cmd_scan(const std::string& config_path, int grid_n, int n_starts) {
  const auto loaded = load(config_path);
  if (!loaded) return kExitInputError;

  const int M = loaded->economy.num_agents();
  if (grid_n > 0 && M != 2) {
    std::cerr << "error: --grid-n scanning is only supported for two-agent "
                 "economies (this one has " << M << ")\n";
    return kExitInputError;
  }
  if (grid_n < 0) grid_n = (M == 2) ? 1000 : 0;
  if (n_starts < 1) {
    std::cerr << "error: --starts must be >= 1\n";
    return kExitInputError;
  }

  MultiplicityReport report;
  try {
    report = probe_multiplicity(loaded->economy, n_starts, grid_n, loaded->config.solver);
  } catch (const NumericalError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNoConvergence;
  }

  std::cout << "distinct equilibrium weight clusters: " << report.roots.size() << "\n";
  for (size_t i = 0; i < report.roots.size(); ++i) {
    const auto& root = report.roots[i];
    std::cout << "root " << (i + 1) << ": w = [";
    for (Eigen::Index m = 0; m < root.weights.size(); ++m) {
      if (m > 0) std::cout << ", ";
      std::cout << real(root.weights[m]);
    }
    std::cout << "] residual = " << short_real(root.residual)
              << " (" << root.source << ")\n";
  }
  if (report.failed_starts > 0) {
    std::cout << "failed starts: " << report.failed_starts << "\n";
  }
  return report.roots.empty() ? kExitNoConvergence : kExitOk;
}

}  // namespace negishi::cli
