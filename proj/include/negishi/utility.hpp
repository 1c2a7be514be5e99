#pragma once

#include <functional>
#include <string>
#include <vector>

#include "negishi/measure.hpp"

namespace negishi {

// Per-agent, per-state utility field. For each state s the map c -> u(c,s) on
// (0, inf) must be strictly increasing, strictly concave and continuously
// differentiable with Inada marginals: du -> inf as c -> 0+ and du -> 0 as
// c -> inf. u(0,s) is the stored limit of u(c,s) as c -> 0+, possibly -inf.
//
// Built-in families carry an optional per-state scale a(s) > 0, giving
// utility a(s) * U(c):
//   crra(gamma):  U(c) = c^(1-gamma)/(1-gamma), gamma > 0, gamma != 1
//   log:          U(c) = ln c
class UtilityField {
public:
  using Evaluator = std::function<double(double, int)>;

  static UtilityField crra(int n_states, double gamma, Vec scale = Vec());
  static UtilityField log_family(int n_states, Vec scale = Vec());
  // Escape hatch for fields outside the built-in families. The caller is
  // responsible for the analytic properties; run validate_field to probe them.
  static UtilityField custom(int n_states, Evaluator u, Evaluator du,
                             Evaluator inv_du, Vec u_at_zero, std::string label);

  double u(double c, int s) const { return c == 0.0 ? u_at_zero_[s] : u_(c, s); }
  double du(double c, int s) const { return du_(c, s); }
  double inv_du(double y, int s) const { return inv_du_(y, s); }
  double u_at_zero(int s) const { return u_at_zero_[s]; }

  int states() const { return n_states_; }
  const std::string& family() const { return family_; }
  // NaN for families without a curvature parameter.
  double gamma() const { return gamma_; }
  const Vec& scale() const { return scale_; }

private:
  UtilityField(int n_states, Evaluator u, Evaluator du, Evaluator inv_du,
               Vec u_at_zero, std::string family, double gamma, Vec scale);

  int n_states_;
  Evaluator u_, du_, inv_du_;
  Vec u_at_zero_;
  std::string family_;
  double gamma_;
  Vec scale_;
};

// Log-spaced consumption grid used by the validators: 1e-6 .. 1e6.
Vec default_check_grid();
Vec log_spaced_grid(double lo, double hi, int n);

struct StateFieldCheck {
  bool u_increasing = false;
  bool du_decreasing = false;
  bool inada_at_zero = false;      // du at the smallest grid point > 1e3 * du(1)
  bool inada_at_infinity = false;  // du at the largest grid point < 1e-3 * du(1)
  bool inverse_consistent = false; // max rel. error of inv_du(du(c)) <= 1e-10
  double inverse_max_rel_error = 0.0;
  bool u_at_zero_is_minus_inf = false;
  bool pass() const {
    return u_increasing && du_decreasing && inada_at_zero && inada_at_infinity &&
           inverse_consistent;
  }
};

struct FieldValidationReport {
  std::vector<StateFieldCheck> states;
  bool pass() const;
};

// Finite-grid probe of the analytic properties above. The Inada checks are
// trend heuristics; they cannot verify limits, only flag realistic violations.
FieldValidationReport validate_field(const UtilityField& field, const Vec& c_grid);

struct ConcavityBoundReport {
  bool pass = true;
  // min over the grid of rhs - lhs for c*du(c) <= 2*(u(c) - u(c/2)); negative
  // values beyond the tolerance are violations.
  double worst_margin = 0.0;
  int worst_state = -1;
  double worst_c = 0.0;
};

// Checks c*du(c,s) <= 2*(u(c,s) - u(c/2,s)) + 1e-12*|u(c,s)| on the grid.
ConcavityBoundReport concavity_bound_check(const UtilityField& field, const Vec& c_grid);

// True per state iff c -> c*du(c,s) is non-decreasing along the grid.
// Relative decreases below 1e-12 are treated as noise and ignored.
std::vector<bool> marginal_times_c_monotone(const UtilityField& field, const Vec& c_grid);

}  // namespace negishi
