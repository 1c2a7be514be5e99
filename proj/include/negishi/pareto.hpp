#pragma once

#include <stdexcept>
#include <vector>

#include "negishi/economy.hpp"

namespace negishi {

// Thrown when a root required by the theory cannot be located numerically,
// e.g. the aggregate-split multiplier fails to bracket. Usually a symptom of
// a utility field violating the Inada conditions or of extreme magnitudes.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Weight vectors live in the non-negative orthant without the origin.
bool is_valid_weights(const Vec& w);
void require_valid_weights(const Vec& w);
// Scales a valid weight vector onto the unit simplex.
Vec normalize_simplex(const Vec& w);

// Optimal split of aggregate consumption c in one state: the unique shares
// attaining sup { sum_m w^m u_m(c^m) : c^m >= 0, sum c^m = c }. For c > 0 the
// shares of active agents (w^m > 0) satisfy w^m du_m(share^m) = lambda, the
// common weighted marginal; inactive agents receive zero. For c = 0 the
// multiplier is undefined and all shares are zero.
struct AggregateSplit {
  double lambda = 0.0;
  bool lambda_defined = false;
  Vec shares;
};

AggregateSplit split_state(const Vec& w, double c, int s,
                           const std::vector<UtilityField>& fields);

// The Pareto map w -> (pi^m(w, Lambda)) applied state by state, together with
// the per-state multiplier U_c(w, Lambda).
struct ParetoAllocation {
  Mat allocation;   // agents x states
  Vec state_price;  // U_c(w, Lambda) per state
};

ParetoAllocation pareto_allocation(const Economy& economy, const Vec& w);

// E[ sum_m w^m U_m(pi^m(w, Lambda)) ] with the convention 0 * (-inf) = 0 for
// zero-weight agents; -inf propagates through the expectation.
double aggregate_utility_value(const Economy& economy, const Vec& w);

// Allocation matrix invariants: entries finite and >= 0, columns summing to
// Lambda within 1e-12 relative.
bool is_valid_allocation(const Mat& allocation, const Economy& economy);

// Brute-force Pareto dominance search for two-agent economies with at most
// four states. Agent 1 receives k_s * Lambda(s) / grid_n in state s and agent
// 2 the rest; all (grid_n+1)^S combinations are tried. Returns the first
// dominating allocation in scan order, if any.
struct DominanceVerdict {
  bool dominated = false;
  Mat dominating;  // valid only when dominated
};

DominanceVerdict dominance_oracle(const Mat& candidate, const Economy& economy,
                                  int grid_n);

}  // namespace negishi
