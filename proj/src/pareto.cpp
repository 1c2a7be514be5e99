#include "negishi/pareto.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace negishi {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kMaxDoublings = 200;
constexpr double kBracketRelWidth = 1e-13;

// sum over active agents of inv_du_m(lambda / w^m, s); strictly decreasing in
// lambda, from +inf at 0+ to 0 at +inf under the Inada conditions.
double total_demand(double lambda, const Vec& w, int s,
                    const std::vector<UtilityField>& fields) {
  double total = 0.0;
  for (size_t m = 0; m < fields.size(); ++m) {
    const double wm = w[static_cast<Eigen::Index>(m)];
    if (wm > 0.0) {
      total += fields[m].inv_du(lambda / wm, s);
    }
  }
  return total;
}

}  // namespace

bool is_valid_weights(const Vec& w) {
  if (w.size() == 0) return false;
  bool any_positive = false;
  for (Eigen::Index m = 0; m < w.size(); ++m) {
    if (!(w[m] >= 0.0) || !std::isfinite(w[m])) return false;
    if (w[m] > 0.0) any_positive = true;
  }
  return any_positive;
}

void require_valid_weights(const Vec& w) {
  if (!is_valid_weights(w)) {
    throw std::invalid_argument(
        "weights must be finite, non-negative and not all zero");
  }
}

Vec normalize_simplex(const Vec& w) {
  require_valid_weights(w);
  return w / w.sum();
}

AggregateSplit split_state(const Vec& w, double c, int s,
                           const std::vector<UtilityField>& fields) {
  require_valid_weights(w);
  if (w.size() != static_cast<Eigen::Index>(fields.size())) {
    throw std::invalid_argument("split_state: weights and fields differ in length");
  }
  if (!(c >= 0.0) || !std::isfinite(c)) {
    throw std::invalid_argument("split_state: aggregate consumption must be finite and >= 0");
  }

  AggregateSplit out;
  out.shares = Vec::Zero(w.size());
  if (c == 0.0) {
    return out;  // pi^m = 0, multiplier undefined
  }

  int n_active = 0;
  int last_active = -1;
  for (Eigen::Index m = 0; m < w.size(); ++m) {
    if (w[m] > 0.0) {
      ++n_active;
      last_active = static_cast<int>(m);
    }
  }
  if (n_active == 1) {
    out.shares[last_active] = c;
    out.lambda = w[last_active] * fields[static_cast<size_t>(last_active)].du(c, s);
    out.lambda_defined = true;
    return out;
  }

  // Initial multiplier: average weighted marginal at the equal split over
  // active agents. Exact for symmetric agents, close otherwise.
  double lambda0 = 0.0;
  for (Eigen::Index m = 0; m < w.size(); ++m) {
    if (w[m] > 0.0) {
      lambda0 += w[m] * fields[static_cast<size_t>(m)].du(c / n_active, s);
    }
  }
  lambda0 /= n_active;
  if (!std::isfinite(lambda0) || lambda0 <= 0.0) {
    lambda0 = 1.0;
  }

  // Geometric bracketing followed by bisection in log lambda. total_demand is
  // decreasing, so demand > c means lambda is too small.
  double lo = lambda0, hi = lambda0;
  const double d0 = total_demand(lambda0, w, s, fields);
  if (d0 > c) {
    lo = lambda0;
    bool bracketed = false;
    for (int k = 0; k < kMaxDoublings; ++k) {
      hi *= 2.0;
      if (total_demand(hi, w, s, fields) <= c) {
        bracketed = true;
        break;
      }
      lo = hi;
    }
    if (!bracketed) {
      throw NumericalError(
          "split_state: multiplier not bracketed after 200 doublings; a "
          "utility field likely violates the Inada conditions");
    }
  } else if (d0 < c) {
    hi = lambda0;
    bool bracketed = false;
    for (int k = 0; k < kMaxDoublings; ++k) {
      lo *= 0.5;
      if (total_demand(lo, w, s, fields) >= c) {
        bracketed = true;
        break;
      }
      hi = lo;
    }
    if (!bracketed) {
      throw NumericalError(
          "split_state: multiplier not bracketed after 200 doublings; a "
          "utility field likely violates the Inada conditions");
    }
  }

  // geometric midpoints via sqrt(lo)*sqrt(hi) to dodge overflow at extremes
  double lambda = std::sqrt(lo) * std::sqrt(hi);
  for (int it = 0; it < 200 && (hi - lo) > kBracketRelWidth * lo; ++it) {
    lambda = std::sqrt(lo) * std::sqrt(hi);
    if (total_demand(lambda, w, s, fields) > c) {
      lo = lambda;
    } else {
      hi = lambda;
    }
  }
  lambda = std::sqrt(lo) * std::sqrt(hi);

  for (Eigen::Index m = 0; m < w.size(); ++m) {
    if (w[m] > 0.0) {
      out.shares[m] = fields[static_cast<size_t>(m)].inv_du(lambda / w[m], s);
    }
  }
  // Single additive correction, distributed proportionally, so the shares
  // exhaust c exactly up to rounding.
  const double sum = out.shares.sum();
  if (sum > 0.0 && std::isfinite(sum)) {
    const double gap = c - sum;
    for (Eigen::Index m = 0; m < w.size(); ++m) {
      if (out.shares[m] > 0.0) {
        out.shares[m] += (out.shares[m] / sum) * gap;
      }
    }
  }
  out.lambda = lambda;
  out.lambda_defined = true;
  return out;
}

ParetoAllocation pareto_allocation(const Economy& economy, const Vec& w) {
  require_valid_weights(w);
  if (w.size() != economy.num_agents()) {
    throw std::invalid_argument("pareto_allocation: weight count does not match agents");
  }
  const int S = economy.num_states();
  const int M = economy.num_agents();
  ParetoAllocation out;
  out.allocation = Mat::Zero(M, S);
  out.state_price = Vec::Zero(S);
  for (int s = 0; s < S; ++s) {
    AggregateSplit split;
    try {
      split = split_state(w, economy.endowment()[s], s, economy.agents());
    } catch (const NumericalError& err) {
      throw NumericalError(std::string(err.what()) + " (state '" +
                           economy.space().id(s) + "')");
    }
    out.allocation.col(s) = split.shares;
    out.state_price[s] = split.lambda;
  }
  return out;
}

double aggregate_utility_value(const Economy& economy, const Vec& w) {
  const ParetoAllocation pareto = pareto_allocation(economy, w);
  const int S = economy.num_states();
  Vec per_state(S);
  for (int s = 0; s < S; ++s) {
    double v = 0.0;
    for (int m = 0; m < economy.num_agents(); ++m) {
      if (w[m] > 0.0) {  // zero-weight agents contribute 0 * (-inf) = 0
        v += w[m] * economy.agent(m).u(pareto.allocation(m, s), s);
      }
    }
    per_state[s] = v;
  }
  return expectation(per_state, economy.space());
}

bool is_valid_allocation(const Mat& allocation, const Economy& economy) {
  if (allocation.rows() != economy.num_agents() ||
      allocation.cols() != economy.num_states()) {
    return false;
  }
  for (int m = 0; m < allocation.rows(); ++m) {
    for (int s = 0; s < allocation.cols(); ++s) {
      const double a = allocation(m, s);
      if (!(a >= 0.0) || !std::isfinite(a)) return false;
    }
  }
  for (int s = 0; s < allocation.cols(); ++s) {
    const double lam = economy.endowment()[s];
    if (std::abs(allocation.col(s).sum() - lam) > 1e-12 * lam) return false;
  }
  return true;
}

DominanceVerdict dominance_oracle(const Mat& candidate, const Economy& economy,
                                  int grid_n) {
  const int M = economy.num_agents();
  const int S = economy.num_states();
  if (M != 2) {
    throw std::invalid_argument("dominance_oracle: only two-agent economies are supported");
  }
  if (S > 4) {
    throw std::invalid_argument("dominance_oracle: at most 4 states are supported");
  }
  if (grid_n < 1) {
    throw std::invalid_argument("dominance_oracle: grid_n must be >= 1");
  }
  if (candidate.rows() != M || candidate.cols() != S) {
    throw std::invalid_argument("dominance_oracle: candidate shape mismatch");
  }

  // Candidate expected utilities; Pareto optimality is only defined for
  // allocations with E[|U_m|] < inf.
  Vec cand_util(M);
  for (int m = 0; m < M; ++m) {
    Vec per_state(S);
    for (int s = 0; s < S; ++s) {
      per_state[s] = economy.agent(m).u(candidate(m, s), s);
    }
    cand_util[m] = expectation(per_state, economy.space());
    if (!std::isfinite(cand_util[m])) {
      throw std::invalid_argument(
          "dominance_oracle: candidate has non-integrable utility");
    }
  }

  // Per-state tables of weighted utilities at each grid share.
  const int K = grid_n + 1;
  Mat table1(S, K), table2(S, K);
  for (int s = 0; s < S; ++s) {
    const double lam = economy.endowment()[s];
    const double mu = economy.space().weight(s);
    for (int k = 0; k < K; ++k) {
      const double b1 = lam * k / grid_n;
      table1(s, k) = mu * economy.agent(0).u(b1, s);
      table2(s, k) = mu * economy.agent(1).u(lam - b1, s);
    }
  }

  const double eps1 = 1e-12 * std::max(1.0, std::abs(cand_util[0]));
  const double eps2 = 1e-12 * std::max(1.0, std::abs(cand_util[1]));

  std::vector<int> k(static_cast<size_t>(S), 0);
  DominanceVerdict verdict;
  while (true) {
    double e1 = 0.0, e2 = 0.0;
    for (int s = 0; s < S; ++s) {
      e1 += table1(s, k[static_cast<size_t>(s)]);
      e2 += table2(s, k[static_cast<size_t>(s)]);
    }
    const bool no_loss = e1 >= cand_util[0] && e2 >= cand_util[1];
    const bool strict_gain = e1 > cand_util[0] + eps1 || e2 > cand_util[1] + eps2;
    if (no_loss && strict_gain) {
      verdict.dominated = true;
      verdict.dominating = Mat(M, S);
      for (int s = 0; s < S; ++s) {
        const double b1 = economy.endowment()[s] * k[static_cast<size_t>(s)] / grid_n;
        verdict.dominating(0, s) = b1;
        verdict.dominating(1, s) = economy.endowment()[s] - b1;
      }
      return verdict;
    }
    // odometer over the S-dimensional grid
    int d = 0;
    while (d < S) {
      if (++k[static_cast<size_t>(d)] < K) break;
      k[static_cast<size_t>(d)] = 0;
      ++d;
    }
    if (d == S) break;
  }
  return verdict;
}

}  // namespace negishi
