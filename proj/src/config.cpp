#include "negishi/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace negishi {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& message) { throw ConfigError(message); }

std::pair<int, int> line_of_byte(const std::string& text, size_t byte) {
  int line = 1, col = 1;
  for (size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

double require_real(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path + ": expected a number");
  return j.get<double>();
}

std::vector<double> require_real_array(const json& j, const std::string& path,
                                       size_t expected_size) {
  if (!j.is_array()) fail(path + ": expected an array of numbers");
  if (j.size() != expected_size) {
    fail(path + ": expected " + std::to_string(expected_size) + " entries, got " +
         std::to_string(j.size()));
  }
  std::vector<double> out;
  out.reserve(j.size());
  for (size_t i = 0; i < j.size(); ++i) {
    out.push_back(require_real(j[i], path + "[" + std::to_string(i) + "]"));
  }
  return out;
}

json slurp_json(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(path + ": cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    const auto [line, col] = line_of_byte(text, e.byte > 0 ? e.byte - 1 : 0);
    fail(path + ":" + std::to_string(line) + ":" + std::to_string(col) +
         ": JSON parse error: " + e.what());
  }
}

std::vector<double> to_std(const Vec& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

}  // namespace

EconomyConfig economy_config_from_json(const json& j) {
  if (!j.is_object()) fail("config root: expected an object");
  EconomyConfig config;
  if (j.contains("schema_version")) {
    if (!j["schema_version"].is_string()) fail("schema_version: expected a string");
    config.schema_version = j["schema_version"].get<std::string>();
  }

  if (!j.contains("states") || !j["states"].is_array() || j["states"].empty()) {
    fail("states: expected a non-empty array");
  }
  for (size_t s = 0; s < j["states"].size(); ++s) {
    const std::string path = "states[" + std::to_string(s) + "]";
    const json& st = j["states"][s];
    if (!st.is_object() || !st.contains("id") || !st.contains("weight")) {
      fail(path + ": expected {id, weight}");
    }
    if (!st["id"].is_string()) fail(path + ".id: expected a string");
    config.state_ids.push_back(st["id"].get<std::string>());
    const double weight = require_real(st["weight"], path + ".weight");
    if (!(weight > 0.0) || !std::isfinite(weight)) {
      fail(path + ".weight: must be strictly positive and finite");
    }
    config.state_weights.push_back(weight);
  }

  if (!j.contains("agents") || !j["agents"].is_array() || j["agents"].empty()) {
    fail("agents: expected a non-empty array");
  }
  const size_t n_states = config.state_ids.size();
  for (size_t a = 0; a < j["agents"].size(); ++a) {
    const std::string path = "agents[" + std::to_string(a) + "]";
    const json& ag = j["agents"][a];
    if (!ag.is_object() || !ag.contains("id") || !ag.contains("utility") ||
        !ag.contains("endowment")) {
      fail(path + ": expected {id, utility, endowment}");
    }
    AgentConfig agent;
    if (!ag["id"].is_string()) fail(path + ".id: expected a string");
    agent.id = ag["id"].get<std::string>();

    const json& util = ag["utility"];
    if (!util.is_object() || !util.contains("family") || !util["family"].is_string()) {
      fail(path + ".utility: expected {family, ...}");
    }
    agent.utility.family = util["family"].get<std::string>();
    if (agent.utility.family == "crra") {
      if (!util.contains("gamma")) fail(path + ".utility: crra requires gamma");
      agent.utility.gamma = require_real(util["gamma"], path + ".utility.gamma");
    } else if (agent.utility.family == "log") {
      if (util.contains("gamma")) fail(path + ".utility: log takes no gamma");
    } else {
      fail(path + ".utility.family: unknown family '" + agent.utility.family +
           "' (expected crra or log)");
    }
    if (util.contains("scale")) {
      agent.utility.scale =
          require_real_array(util["scale"], path + ".utility.scale", n_states);
    }

    agent.endowment = require_real_array(ag["endowment"], path + ".endowment", n_states);
    for (size_t s = 0; s < n_states; ++s) {
      const double e = agent.endowment[s];
      if (!(e >= 0.0) || !std::isfinite(e)) {
        fail(path + ".endowment[" + std::to_string(s) + "]: must be finite and >= 0");
      }
    }
    config.agents.push_back(std::move(agent));
  }

  if (j.contains("solver")) {
    const json& sv = j["solver"];
    if (!sv.is_object()) fail("solver: expected an object");
    if (sv.contains("tol_budget")) {
      config.solver.tol_budget = require_real(sv["tol_budget"], "solver.tol_budget");
      if (!(config.solver.tol_budget > 0.0)) fail("solver.tol_budget: must be > 0");
    }
    if (sv.contains("max_iters")) {
      config.solver.max_iters = static_cast<int>(require_real(sv["max_iters"], "solver.max_iters"));
      if (config.solver.max_iters < 1) fail("solver.max_iters: must be >= 1");
    }
    if (sv.contains("warmup_iters")) {
      config.solver.warmup_iters =
          static_cast<int>(require_real(sv["warmup_iters"], "solver.warmup_iters"));
      if (config.solver.warmup_iters < 0) fail("solver.warmup_iters: must be >= 0");
    }
    if (sv.contains("w_floor")) {
      config.solver.w_floor = require_real(sv["w_floor"], "solver.w_floor");
      if (!(config.solver.w_floor > 0.0)) fail("solver.w_floor: must be > 0");
    }
    if (sv.contains("start")) {
      const auto start =
          require_real_array(sv["start"], "solver.start", config.agents.size());
      Vec w(static_cast<Eigen::Index>(start.size()));
      for (size_t i = 0; i < start.size(); ++i) {
        if (!(start[i] > 0.0)) fail("solver.start: entries must be strictly positive");
        w[static_cast<Eigen::Index>(i)] = start[i];
      }
      config.solver.start = w;
    }
  }
  return config;
}

EconomyConfig load_economy_config(const std::string& path) {
  return economy_config_from_json(slurp_json(path));
}

UtilityField build_utility(const UtilitySpec& spec, int n_states) {
  Vec scale;
  if (!spec.scale.empty()) {
    scale = Vec(static_cast<Eigen::Index>(spec.scale.size()));
    for (size_t i = 0; i < spec.scale.size(); ++i) {
      scale[static_cast<Eigen::Index>(i)] = spec.scale[i];
    }
  }
  if (spec.family == "crra") {
    return UtilityField::crra(n_states, spec.gamma, std::move(scale));
  }
  if (spec.family == "log") {
    return UtilityField::log_family(n_states, std::move(scale));
  }
  fail("utility family '" + spec.family + "' is not supported");
}

Economy build_economy(const EconomyConfig& config) {
  const int n_states = static_cast<int>(config.state_ids.size());
  const int n_agents = static_cast<int>(config.agents.size());

  Vec weights(n_states);
  for (int s = 0; s < n_states; ++s) weights[s] = config.state_weights[static_cast<size_t>(s)];
  StateSpace space(config.state_ids, std::move(weights));

  Mat initial(n_agents, n_states);
  std::vector<UtilityField> fields;
  fields.reserve(static_cast<size_t>(n_agents));
  for (int m = 0; m < n_agents; ++m) {
    const AgentConfig& agent = config.agents[static_cast<size_t>(m)];
    bool any_positive = false;
    for (int s = 0; s < n_states; ++s) {
      initial(m, s) = agent.endowment[static_cast<size_t>(s)];
      if (initial(m, s) > 0.0) any_positive = true;
    }
    if (!any_positive) {
      fail("agent '" + agent.id +
           "': endowment is identically zero; every agent must hold a nonzero "
           "initial claim (alpha^m_0 != 0)");
    }
    try {
      fields.push_back(build_utility(agent.utility, n_states));
    } catch (const std::invalid_argument& e) {
      fail("agent '" + agent.id + "': " + e.what());
    }
  }

  Vec lambda(n_states);
  for (int s = 0; s < n_states; ++s) {
    lambda[s] = initial.col(s).sum();
    if (!(lambda[s] > 0.0)) {
      fail("state '" + config.state_ids[static_cast<size_t>(s)] +
           "': total endowment must be strictly positive (Lambda > 0)");
    }
  }
  StateFunction endowment(space, std::move(lambda));
  return Economy(std::move(space), std::move(fields), std::move(endowment),
                 std::move(initial));
}

ordered_json solve_report_json(const SolveOutcome& outcome, const EconomyConfig& config) {
  const EquilibriumCertificate& cert = outcome.certificate;
  ordered_json j;
  j["schema_version"] = "1";
  j["converged"] = outcome.converged();
  j["iterations"] = outcome.iterations;
  j["residual"] = outcome.residual;
  j["boundary_collapse"] = outcome.boundary_collapse;
  ordered_json agents = ordered_json::array();
  for (const auto& a : config.agents) agents.push_back(a.id);
  j["agents"] = agents;
  j["states"] = config.state_ids;
  j["weights"] = to_std(cert.weights);
  j["z"] = cert.z;
  j["zeta"] = to_std(cert.zeta);
  ordered_json alloc = ordered_json::array();
  for (Eigen::Index m = 0; m < cert.allocation.rows(); ++m) {
    ordered_json row = ordered_json::array();
    for (Eigen::Index s = 0; s < cert.allocation.cols(); ++s) {
      row.push_back(cert.allocation(m, s));
    }
    alloc.push_back(row);
  }
  j["allocation"] = alloc;
  j["residuals"] = {
      {"budget", to_std(cert.residuals.budget)},
      {"foc_per_state", to_std(cert.residuals.foc_per_state)},
      {"scale", cert.residuals.scale},
      {"max_relative_budget", cert.residuals.max_relative_budget},
  };
  j["integrability"] = {
      {"abs_utility", to_std(cert.integrability.abs_utility)},
      {"marginal_value_of_endowment", to_std(cert.integrability.marginal_value_of_endowment)},
      {"equal_split_bound", cert.integrability.equal_split_bound},
      {"overflow_risk", cert.integrability.overflow_risk},
      {"notes", cert.integrability.notes},
  };
  j["method_trace"] = outcome.method_trace;
  j["residual_trace"] = outcome.residual_trace;
  return j;
}

void write_solve_report(const std::string& path, const SolveOutcome& outcome,
                        const EconomyConfig& config) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(path + ": cannot open for writing");
  out << solve_report_json(outcome, config).dump(2) << "\n";
}

std::string allocation_csv(const SolveOutcome& outcome, const EconomyConfig& config) {
  const EquilibriumCertificate& cert = outcome.certificate;
  std::string csv = "state,weight,endowment,zeta";
  for (const auto& a : config.agents) csv += "," + a.id;
  csv += "\n";
  char buf[64];
  const auto append_real = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    csv += buf;
  };
  const int S = static_cast<int>(config.state_ids.size());
  for (int s = 0; s < S; ++s) {
    csv += config.state_ids[static_cast<size_t>(s)];
    csv += ",";
    append_real(config.state_weights[static_cast<size_t>(s)]);
    double lambda = 0.0;
    for (const auto& a : config.agents) lambda += a.endowment[static_cast<size_t>(s)];
    csv += ",";
    append_real(lambda);
    csv += ",";
    append_real(cert.zeta[s]);
    for (Eigen::Index m = 0; m < cert.allocation.rows(); ++m) {
      csv += ",";
      append_real(cert.allocation(m, s));
    }
    csv += "\n";
  }
  return csv;
}

void write_allocation_csv(const std::string& path, const SolveOutcome& outcome,
                          const EconomyConfig& config) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(path + ": cannot open for writing");
  out << allocation_csv(outcome, config);
}

EquilibriumCertificate certificate_from_file(const std::string& path,
                                             const EconomyConfig& config) {
  const json j = slurp_json(path);
  if (!j.is_object()) fail(path + ": expected a report object");
  const size_t M = config.agents.size();
  const size_t S = config.state_ids.size();

  if (j.contains("agents")) {
    const auto ids = j["agents"].get<std::vector<std::string>>();
    if (ids.size() != M) fail(path + ": certificate agent count differs from config");
    for (size_t m = 0; m < M; ++m) {
      if (ids[m] != config.agents[m].id) {
        fail(path + ": certificate agents are not aligned with the config (" +
             ids[m] + " vs " + config.agents[m].id + ")");
      }
    }
  }
  if (j.contains("states")) {
    const auto ids = j["states"].get<std::vector<std::string>>();
    if (ids.size() != S) fail(path + ": certificate state count differs from config");
    for (size_t s = 0; s < S; ++s) {
      if (ids[s] != config.state_ids[s]) {
        fail(path + ": certificate states are not aligned with the config (" +
             ids[s] + " vs " + config.state_ids[s] + ")");
      }
    }
  }

  for (const char* key : {"weights", "z", "zeta", "allocation"}) {
    if (!j.contains(key)) fail(path + ": certificate is missing '" + std::string(key) + "'");
  }
  EquilibriumCertificate cert;
  const auto weights = require_real_array(j["weights"], "weights", M);
  cert.weights = Vec(static_cast<Eigen::Index>(M));
  for (size_t m = 0; m < M; ++m) cert.weights[static_cast<Eigen::Index>(m)] = weights[m];
  cert.z = require_real(j["z"], "z");
  const auto zeta = require_real_array(j["zeta"], "zeta", S);
  cert.zeta = Vec(static_cast<Eigen::Index>(S));
  for (size_t s = 0; s < S; ++s) cert.zeta[static_cast<Eigen::Index>(s)] = zeta[s];
  if (!j["allocation"].is_array() || j["allocation"].size() != M) {
    fail(path + ": allocation must have one row per agent");
  }
  cert.allocation = Mat(static_cast<Eigen::Index>(M), static_cast<Eigen::Index>(S));
  for (size_t m = 0; m < M; ++m) {
    const auto row =
        require_real_array(j["allocation"][m], "allocation[" + std::to_string(m) + "]", S);
    for (size_t s = 0; s < S; ++s) {
      cert.allocation(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(s)) = row[s];
    }
  }
  return cert;
}

}  // namespace negishi
