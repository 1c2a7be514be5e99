#pragma once

#include <optional>
#include <string>
#include <vector>

#include "negishi/economy.hpp"
#include "negishi/pareto.hpp"

namespace negishi {

// Excess value of each agent at weights w:
//   f_m(w) = E[ U_c(w,Lambda) * (pi^m(w,Lambda) - alpha^m_0) ].
// The f_m sum to zero (Walras identity) because both allocations exhaust
// Lambda. Equilibrium weights are exactly the interior roots of f.
Vec excess_value(const Economy& economy, const Vec& w);

// Excess utility h_m(w) = f_m(w) / w^m = E[U'_m(pi^m)(pi^m - alpha^m_0)].
// Requires every coordinate strictly positive; 0-homogeneous in w.
Vec excess_utility(const Economy& economy, const Vec& w);

// The Brouwer map from the existence proof:
//   g_m(w) = (w^m + max(0, -f_m(w))) / (1 + sum_n max(0, -f_n(w))).
// Maps the simplex into itself; interior fixed points are roots of f.
Vec fixed_point_map(const Economy& economy, const Vec& w);

struct SolveOptions {
  // Convergence target: max_m |f_m(w)| <= tol_budget * E[U_c * Lambda].
  double tol_budget = 1e-10;
  // Iteration cap for the tatonnement fallback.
  int max_iters = 10000;
  // Fixed-point warm-up length before switching to Newton.
  int warmup_iters = 50;
  // Weight coordinates are clamped to this floor and renormalized.
  double w_floor = 1e-12;
  // Optional starting weights; defaults to the uniform simplex point.
  std::optional<Vec> start;
};

struct IntegrabilityReport {
  Vec abs_utility;                  // E[|U_m(pi^m(w,Lambda))|] per agent
  Vec marginal_value_of_endowment;  // E[U'_m(pi^m) * Lambda] per agent
  // E[ sum_m U'_m(Lambda/M) * Lambda ], the equal-split domination bound.
  double equal_split_bound = 0.0;
  bool overflow_risk = false;
  std::vector<std::string> notes;
};

struct ResidualReport {
  Vec budget;         // f_m at the certified weights
  Vec foc_per_state;  // max_m |w^m du_m(alloc) / lambda - 1| per state
  double scale = 0.0; // E[U_c * Lambda]
  double max_relative_budget = 0.0;
};

// A solved equilibrium in the finite-dimensional parametrization: interior
// simplex weights w, scale z > 0, state price density zeta = z * U_c(w,Lambda)
// and the Pareto allocation at w.
struct EquilibriumCertificate {
  Vec weights;
  double z = 1.0;
  Vec zeta;
  Mat allocation;
  ResidualReport residuals;
  IntegrabilityReport integrability;
};

enum class SolveStatus { converged, no_convergence };

struct SolveOutcome {
  SolveStatus status = SolveStatus::no_convergence;
  EquilibriumCertificate certificate;  // best iterate, certified or not
  double residual = 0.0;               // final max_m |f_m| / scale
  int iterations = 0;
  std::vector<double> residual_trace;
  std::vector<std::string> method_trace;
  // Some weight stayed pinned at the floor for 100 consecutive iterations;
  // suggests degeneracy rather than an interior root.
  bool boundary_collapse = false;
  bool converged() const { return status == SolveStatus::converged; }
};

// Finds interior weights zeroing the excess values. Pipeline: fixed-point
// warm-up, damped Newton on the Walras-reduced system with a finite-difference
// Jacobian, tatonnement fallback. Never fabricates a certificate: on failure
// the outcome carries the best iterate and the full residual trace.
SolveOutcome solve(const Economy& economy, const SolveOptions& options = {});

struct VerifyOptions {
  double tol_budget = 1e-10;
  double tol_clearing = 1e-12;
  double tol_foc = 1e-8;
};

struct VerifyCheck {
  std::string name;
  bool pass = false;
  double magnitude = 0.0;
  double threshold = 0.0;
};

struct VerificationReport {
  std::vector<VerifyCheck> checks;
  bool all_pass() const;
};

// Checks a certificate against the economy: market clearing, budgets priced
// by zeta, state-constant marginal-rate ratios equal to 1/(z w^m), finiteness
// of E[zeta Lambda] and E[|U_m|], interiority of w and positivity of zeta.
// Accepts any scale z > 0.
VerificationReport verify(const EquilibriumCertificate& certificate,
                          const Economy& economy, const VerifyOptions& options = {});

struct UniquenessReport {
  // Per agent: true iff c -> c*du(c,s) is non-decreasing in every state.
  std::vector<bool> gross_substitute;
  std::vector<int> violators;
  // Uniqueness is guaranteed with at most one violating agent; that agent (or
  // any agent, when none violate) may serve as the exceptional index m0.
  bool unique_guaranteed = false;
  std::vector<int> m0_candidates;
};

UniquenessReport check_uniqueness_preconditions(const Economy& economy, const Vec& c_grid);

struct EquilibriumRoot {
  Vec weights;
  double residual = 0.0;
  std::string source;  // "start k" or "scan"
};

struct MultiplicityReport {
  std::vector<EquilibriumRoot> roots;  // distinct up to 1e-6 in L-inf
  int failed_starts = 0;
};

// Hunts for multiple equilibria: runs solve from n_starts deterministic
// low-discrepancy simplex starts and, for two agents, scans h_1 over scan_n
// interior grid points, bisecting every sign change.
MultiplicityReport probe_multiplicity(const Economy& economy, int n_starts,
                                      int scan_n, const SolveOptions& options = {});

// Magnitude report for the integrability conditions. On a finite state space
// every expectation here is finite automatically; the report surfaces the
// magnitudes and flags values near the limits of double precision.
IntegrabilityReport integrability_report(const Economy& economy, const Vec& w);

}  // namespace negishi
