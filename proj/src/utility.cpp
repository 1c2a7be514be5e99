#include "negishi/utility.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

namespace negishi {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Vec resolve_scale(int n_states, Vec scale, const char* family) {
  if (scale.size() == 0) {
    return Vec::Ones(n_states);
  }
  if (scale.size() != n_states) {
    throw std::invalid_argument(std::string(family) +
                                ": scale length does not match state count");
  }
  for (Eigen::Index s = 0; s < scale.size(); ++s) {
    if (!(scale[s] > 0.0) || !std::isfinite(scale[s])) {
      throw std::invalid_argument(std::string(family) +
                                  ": scale coefficients must be strictly positive");
    }
  }
  return scale;
}

}  // namespace

UtilityField::UtilityField(int n_states, Evaluator u, Evaluator du, Evaluator inv_du,
                           Vec u_at_zero, std::string family, double gamma, Vec scale)
    : n_states_(n_states),
      u_(std::move(u)),
      du_(std::move(du)),
      inv_du_(std::move(inv_du)),
      u_at_zero_(std::move(u_at_zero)),
      family_(std::move(family)),
      gamma_(gamma),
      scale_(std::move(scale)) {
  if (n_states_ < 1) {
    throw std::invalid_argument("UtilityField: need at least one state");
  }
  if (u_at_zero_.size() != n_states_) {
    throw std::invalid_argument("UtilityField: u_at_zero length mismatch");
  }
  for (Eigen::Index s = 0; s < u_at_zero_.size(); ++s) {
    if (std::isnan(u_at_zero_[s]) || u_at_zero_[s] == kInf) {
      throw std::invalid_argument("UtilityField: u(0) must lie in [-inf, inf)");
    }
  }
}

UtilityField UtilityField::crra(int n_states, double gamma, Vec scale) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw std::invalid_argument("crra: gamma must be positive and finite");
  }
  if (gamma == 1.0) {
    throw std::invalid_argument("crra: gamma = 1 is not admitted, use the log family");
  }
  Vec a = resolve_scale(n_states, std::move(scale), "crra");
  const double expo = 1.0 - gamma;
  Vec u0 = (gamma > 1.0) ? Vec::Constant(n_states, -kInf) : Vec::Zero(n_states);
  return UtilityField(
      n_states,
      [a, expo](double c, int s) { return a[s] * std::pow(c, expo) / expo; },
      [a, gamma](double c, int s) { return a[s] * std::pow(c, -gamma); },
      [a, gamma](double y, int s) { return std::pow(y / a[s], -1.0 / gamma); },
      std::move(u0), "crra", gamma, a);
}

UtilityField UtilityField::log_family(int n_states, Vec scale) {
  Vec a = resolve_scale(n_states, std::move(scale), "log");
  return UtilityField(
      n_states,
      [a](double c, int s) { return a[s] * std::log(c); },
      [a](double c, int s) { return a[s] / c; },
      [a](double y, int s) { return a[s] / y; },
      Vec::Constant(n_states, -kInf), "log",
      std::numeric_limits<double>::quiet_NaN(), a);
}

UtilityField UtilityField::custom(int n_states, Evaluator u, Evaluator du,
                                  Evaluator inv_du, Vec u_at_zero, std::string label) {
  return UtilityField(n_states, std::move(u), std::move(du), std::move(inv_du),
                      std::move(u_at_zero), std::move(label),
                      std::numeric_limits<double>::quiet_NaN(), Vec());
}

Vec log_spaced_grid(double lo, double hi, int n) {
  if (!(lo > 0.0) || !(hi > lo) || n < 2) {
    throw std::invalid_argument("log_spaced_grid: need 0 < lo < hi and n >= 2");
  }
  Vec grid(n);
  const double llo = std::log(lo);
  const double lhi = std::log(hi);
  for (int i = 0; i < n; ++i) {
    grid[i] = std::exp(llo + (lhi - llo) * i / (n - 1));
  }
  grid[0] = lo;
  grid[n - 1] = hi;
  return grid;
}

Vec default_check_grid() { return log_spaced_grid(1e-6, 1e6, 97); }

bool FieldValidationReport::pass() const {
  for (const auto& st : states) {
    if (!st.pass()) return false;
  }
  return true;
}

FieldValidationReport validate_field(const UtilityField& field, const Vec& c_grid) {
  const Eigen::Index n = c_grid.size();
  if (n < 2) {
    throw std::invalid_argument("validate_field: grid needs at least 2 points");
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(c_grid[i] > 0.0) || (i + 1 < n && !(c_grid[i] < c_grid[i + 1]))) {
      throw std::invalid_argument("validate_field: grid must be positive and strictly increasing");
    }
  }

  FieldValidationReport report;
  report.states.resize(static_cast<size_t>(field.states()));
  for (int s = 0; s < field.states(); ++s) {
    StateFieldCheck& chk = report.states[static_cast<size_t>(s)];
    chk.u_increasing = true;
    chk.du_decreasing = true;
    chk.inverse_consistent = true;
    double prev_u = field.u(c_grid[0], s);
    double prev_du = field.du(c_grid[0], s);
    double max_rel = 0.0;
    {
      const double c = c_grid[0];
      const double back = field.inv_du(field.du(c, s), s);
      max_rel = std::abs(back - c) / c;
    }
    for (Eigen::Index i = 1; i < n; ++i) {
      const double c = c_grid[i];
      const double ui = field.u(c, s);
      const double di = field.du(c, s);
      if (!(ui > prev_u)) chk.u_increasing = false;
      if (!(di < prev_du)) chk.du_decreasing = false;
      const double back = field.inv_du(di, s);
      max_rel = std::max(max_rel, std::abs(back - c) / c);
      prev_u = ui;
      prev_du = di;
    }
    const double du_unit = field.du(1.0, s);
    chk.inada_at_zero = field.du(c_grid[0], s) > 1e3 * du_unit;
    chk.inada_at_infinity = field.du(c_grid[n - 1], s) < 1e-3 * du_unit;
    chk.inverse_max_rel_error = max_rel;
    chk.inverse_consistent = max_rel <= 1e-10;
    chk.u_at_zero_is_minus_inf = field.u_at_zero(s) == -kInf;
  }
  return report;
}

ConcavityBoundReport concavity_bound_check(const UtilityField& field, const Vec& c_grid) {
  ConcavityBoundReport report;
  report.worst_margin = kInf;
  for (int s = 0; s < field.states(); ++s) {
    for (Eigen::Index i = 0; i < c_grid.size(); ++i) {
      const double c = c_grid[i];
      if (!(c > 0.0)) {
        throw std::invalid_argument("concavity_bound_check: grid points must be positive");
      }
      const double uc = field.u(c, s);
      const double lhs = c * field.du(c, s);
      const double rhs = 2.0 * (uc - field.u(c / 2.0, s)) + 1e-12 * std::abs(uc);
      const double margin = rhs - lhs;
      if (margin < report.worst_margin) {
        report.worst_margin = margin;
        report.worst_state = s;
        report.worst_c = c;
      }
      if (!(lhs <= rhs)) report.pass = false;
    }
  }
  return report;
}

std::vector<bool> marginal_times_c_monotone(const UtilityField& field, const Vec& c_grid) {
  const Eigen::Index n = c_grid.size();
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    if (!(c_grid[i] < c_grid[i + 1])) {
      throw std::invalid_argument("marginal_times_c_monotone: grid must be strictly increasing");
    }
  }
  std::vector<bool> per_state(static_cast<size_t>(field.states()), true);
  for (int s = 0; s < field.states(); ++s) {
    double prev = c_grid[0] * field.du(c_grid[0], s);
    for (Eigen::Index i = 1; i < n; ++i) {
      const double g = c_grid[i] * field.du(c_grid[i], s);
      const double drop = prev - g;
      if (drop > 1e-12 * std::max(std::abs(prev), std::abs(g))) {
        per_state[static_cast<size_t>(s)] = false;
        break;
      }
      prev = g;
    }
  }
  return per_state;
}

}  // namespace negishi
