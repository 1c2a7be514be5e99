#include "negishi/equilibrium.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace negishi {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kNewtonMaxIters = 200;
constexpr int kNewtonMaxHalvings = 30;
constexpr int kPinnedCollapseIters = 100;

struct EvalPoint {
  Vec f;
  double scale = 0.0;  // E[U_c * Lambda]
  double rel = kInf;   // max_m |f_m| / scale
  ParetoAllocation pareto;
};

EvalPoint evaluate(const Economy& economy, const Vec& w) {
  EvalPoint p;
  p.pareto = pareto_allocation(economy, w);
  const int M = economy.num_agents();
  const int S = economy.num_states();
  p.f = Vec::Zero(M);
  p.scale = 0.0;
  for (int s = 0; s < S; ++s) {
    const double mu_lam = economy.space().weight(s) * p.pareto.state_price[s];
    for (int m = 0; m < M; ++m) {
      p.f[m] += mu_lam * (p.pareto.allocation(m, s) - economy.initial_allocation()(m, s));
    }
    p.scale += mu_lam * economy.endowment()[s];
  }
  const double worst = p.f.abs().maxCoeff();
  p.rel = (p.scale > 0.0 && std::isfinite(p.scale)) ? worst / p.scale : worst;
  return p;
}

Vec project_to_simplex(Vec w, double floor) {
  for (Eigen::Index m = 0; m < w.size(); ++m) {
    if (!(w[m] > floor)) w[m] = floor;
  }
  return w / w.sum();
}

double halton(int index, int base) {
  double f = 1.0, r = 0.0;
  while (index > 0) {
    f /= base;
    r += f * (index % base);
    index /= base;
  }
  return r;
}

int nth_prime(int n) {
  // n is small here (one prime per agent)
  int count = 0;
  for (int p = 2;; ++p) {
    bool prime = true;
    for (int d = 2; d * d <= p; ++d) {
      if (p % d == 0) {
        prime = false;
        break;
      }
    }
    if (prime && ++count == n + 1) return p;
  }
}

std::string format_double(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

}  // namespace

Vec excess_value(const Economy& economy, const Vec& w) {
  return evaluate(economy, w).f;
}

Vec excess_utility(const Economy& economy, const Vec& w) {
  require_valid_weights(w);
  for (Eigen::Index m = 0; m < w.size(); ++m) {
    if (!(w[m] > 0.0)) {
      throw std::invalid_argument("excess_utility: weights must be strictly positive");
    }
  }
  const Vec f = excess_value(economy, w);
  return f / w;
}

Vec fixed_point_map(const Economy& economy, const Vec& w) {
  require_valid_weights(w);
  if (std::abs(w.sum() - 1.0) > 1e-9) {
    throw std::invalid_argument("fixed_point_map: weights must lie on the unit simplex");
  }
  const Vec f = excess_value(economy, w);
  const Vec shortfall = (-f).max(0.0);
  return (w + shortfall) / (1.0 + shortfall.sum());
}

namespace {

EquilibriumCertificate assemble_certificate(const Economy& economy, const Vec& w,
                                            const EvalPoint& point) {
  EquilibriumCertificate cert;
  cert.weights = w;
  cert.z = 1.0;
  cert.zeta = point.pareto.state_price;
  cert.allocation = point.pareto.allocation;
  cert.residuals.budget = point.f;
  cert.residuals.scale = point.scale;
  cert.residuals.max_relative_budget = point.rel;
  const int S = economy.num_states();
  cert.residuals.foc_per_state = Vec::Zero(S);
  for (int s = 0; s < S; ++s) {
    const double lam = point.pareto.state_price[s];
    double worst = 0.0;
    for (int m = 0; m < economy.num_agents(); ++m) {
      if (w[m] > 0.0 && cert.allocation(m, s) > 0.0) {
        const double ratio = w[m] * economy.agent(m).du(cert.allocation(m, s), s) / lam;
        worst = std::max(worst, std::abs(ratio - 1.0));
      }
    }
    cert.residuals.foc_per_state[s] = worst;
  }
  cert.integrability = integrability_report(economy, w);
  return cert;
}

}  // namespace

SolveOutcome solve(const Economy& economy, const SolveOptions& options) {
  const int M = economy.num_agents();
  SolveOutcome out;

  Vec w;
  if (options.start.has_value()) {
    require_valid_weights(*options.start);
    if (options.start->size() != M) {
      throw std::invalid_argument("solve: start weights do not match the agent count");
    }
    w = project_to_simplex(*options.start, options.w_floor);
  } else {
    w = Vec::Constant(M, 1.0 / M);
  }

  if (M == 1) {
    // A single agent consumes the whole endowment; any weight is equilibrium.
    EvalPoint point = evaluate(economy, w);
    out.status = SolveStatus::converged;
    out.residual = point.rel;
    out.iterations = 0;
    out.residual_trace.push_back(point.rel);
    out.method_trace.push_back("trivial: single agent");
    out.certificate = assemble_certificate(economy, w, point);
    return out;
  }

  EvalPoint point = evaluate(economy, w);
  Vec best_w = w;
  EvalPoint best = point;
  int iterations = 0;
  int pinned_streak = 0;
  bool collapsed = false;
  const auto record = [&](const Vec& wi, const EvalPoint& pi) {
    out.residual_trace.push_back(pi.rel);
    if (pi.rel < best.rel) {
      best = pi;
      best_w = wi;
    }
    double lo = wi.minCoeff();
    if (lo <= 2.0 * options.w_floor) {
      if (++pinned_streak >= kPinnedCollapseIters) collapsed = true;
    } else {
      pinned_streak = 0;
    }
  };
  record(w, point);

  bool converged = point.rel <= options.tol_budget;

  // Phase 1: fixed-point warm-up.
  if (!converged) {
    int warm = 0;
    while (warm < options.warmup_iters) {
      const Vec shortfall = (-point.f).max(0.0);
      Vec wn = (w + shortfall) / (1.0 + shortfall.sum());
      wn = project_to_simplex(wn, options.w_floor);
      const double step = (wn - w).abs().maxCoeff();
      w = wn;
      point = evaluate(economy, w);
      ++warm;
      ++iterations;
      record(w, point);
      if (point.rel <= options.tol_budget) {
        converged = true;
        break;
      }
      if (step < 1e-3 * point.rel) break;  // stalled, hand over to Newton
    }
    out.method_trace.push_back("fixed_point_warmup: iters=" + std::to_string(warm) +
                               " rel=" + format_double(point.rel));
  }

  // Phase 2: damped Newton on the reduced system f_1..f_{M-1} in
  // (w^1..w^{M-1}), with w^M = 1 - sum.
  bool newton_failed = false;
  if (!converged) {
    int newton_iters = 0;
    while (newton_iters < kNewtonMaxIters) {
      Eigen::MatrixXd jac(M - 1, M - 1);
      bool jac_ok = true;
      for (int j = 0; j < M - 1 && jac_ok; ++j) {
        double delta = 1e-6 * std::max(w[j], 1e-3);
        delta = std::min({delta, 0.45 * w[j], 0.45 * w[M - 1]});
        if (!(delta > 0.0)) {
          jac_ok = false;
          break;
        }
        Vec wp = w, wm = w;
        wp[j] += delta;
        wp[M - 1] -= delta;
        wm[j] -= delta;
        wm[M - 1] += delta;
        const Vec fp = excess_value(economy, wp);
        const Vec fm = excess_value(economy, wm);
        for (int i = 0; i < M - 1; ++i) {
          jac(i, j) = (fp[i] - fm[i]) / (2.0 * delta);
          if (!std::isfinite(jac(i, j))) jac_ok = false;
        }
      }
      if (!jac_ok) {
        newton_failed = true;
        break;
      }
      Eigen::VectorXd rhs(M - 1);
      for (int i = 0; i < M - 1; ++i) rhs[i] = -point.f[i];
      const Eigen::VectorXd dir = jac.partialPivLu().solve(rhs);
      if (!dir.allFinite()) {
        newton_failed = true;
        break;
      }

      bool accepted = false;
      double t = 1.0;
      for (int half = 0; half <= kNewtonMaxHalvings; ++half) {
        Vec w_try = w;
        for (int i = 0; i < M - 1; ++i) w_try[i] += t * dir[i];
        w_try[M - 1] = 1.0 - (w_try.sum() - w_try[M - 1]);
        w_try = project_to_simplex(w_try, options.w_floor);
        const EvalPoint trial = evaluate(economy, w_try);
        if (trial.rel < point.rel) {
          w = w_try;
          point = trial;
          accepted = true;
          break;
        }
        t *= 0.5;
      }
      ++newton_iters;
      ++iterations;
      if (!accepted) {
        newton_failed = true;
        break;
      }
      record(w, point);
      if (point.rel <= options.tol_budget) {
        converged = true;
        break;
      }
    }
    out.method_trace.push_back("newton: iters=" + std::to_string(newton_iters) +
                               " rel=" + format_double(point.rel) +
                               (newton_failed ? " (failed)" : ""));
  }

  // Polish: once at the target, a couple of extra Newton-free fixed-point
  // steps often shave the residual further; keep only improvements.
  if (converged) {
    for (int extra = 0; extra < 2; ++extra) {
      const Vec shortfall = (-point.f).max(0.0);
      Vec wn = (w + shortfall) / (1.0 + shortfall.sum());
      wn = project_to_simplex(wn, options.w_floor);
      const EvalPoint trial = evaluate(economy, wn);
      if (trial.rel < point.rel) {
        w = wn;
        point = trial;
        record(w, point);
      } else {
        break;
      }
    }
  }

  // Phase 3: normalized tatonnement fallback, multiplicative updates along
  // the excess utilities with a halving step size.
  (void)newton_failed;
  if (!converged) {
    double eta = -1.0;
    int taton_iters = 0;
    while (iterations < options.max_iters) {
      Vec h_hat(M);
      for (int m = 0; m < M; ++m) {
        h_hat[m] = point.f[m] / (std::max(w[m], options.w_floor) * std::max(point.scale, 1e-300));
      }
      if (eta < 0.0) {
        eta = 1.0 / (1.0 + h_hat.abs().maxCoeff());
      }
      Vec w_try(M);
      for (int m = 0; m < M; ++m) {
        w_try[m] = w[m] * std::exp(-eta * h_hat[m]);
      }
      w_try = project_to_simplex(w_try, options.w_floor);
      const EvalPoint trial = evaluate(economy, w_try);
      ++taton_iters;
      ++iterations;
      if (trial.rel < point.rel) {
        w = w_try;
        point = trial;
        record(w, point);
        if (point.rel <= options.tol_budget) {
          converged = true;
          break;
        }
      } else {
        eta *= 0.5;
        if (eta < 1e-18) break;
      }
    }
    out.method_trace.push_back("tatonnement: iters=" + std::to_string(taton_iters) +
                               " rel=" + format_double(point.rel));
  }

  if (!converged && best.rel <= options.tol_budget) {
    // best iterate seen along the way already met the target
    converged = true;
    w = best_w;
    point = best;
  }

  out.iterations = iterations;
  out.boundary_collapse = collapsed;
  if (collapsed) {
    out.method_trace.push_back(
        "boundary collapse: a weight stayed at the floor for 100+ iterations; "
        "possible degeneracy");
  }
  if (converged) {
    out.status = SolveStatus::converged;
    out.residual = point.rel;
    out.certificate = assemble_certificate(economy, w, point);
  } else {
    out.status = SolveStatus::no_convergence;
    out.residual = best.rel;
    out.certificate = assemble_certificate(economy, best_w, best);
  }
  return out;
}

bool VerificationReport::all_pass() const {
  for (const auto& c : checks) {
    if (!c.pass) return false;
  }
  return true;
}

VerificationReport verify(const EquilibriumCertificate& certificate,
                          const Economy& economy, const VerifyOptions& options) {
  const int M = economy.num_agents();
  const int S = economy.num_states();
  if (certificate.weights.size() != M || certificate.zeta.size() != S ||
      certificate.allocation.rows() != M || certificate.allocation.cols() != S) {
    throw std::invalid_argument("verify: certificate is misaligned with the economy");
  }
  if (!(certificate.z > 0.0) || !std::isfinite(certificate.z)) {
    throw std::invalid_argument("verify: certificate scale z must be positive and finite");
  }

  VerificationReport report;
  const Vec& w = certificate.weights;
  const Vec& zeta = certificate.zeta;
  const Mat& alloc = certificate.allocation;

  {  // (i) market clearing per state
    double worst = 0.0;
    for (int s = 0; s < S; ++s) {
      const double lam = economy.endowment()[s];
      worst = std::max(worst, std::abs(alloc.col(s).sum() - lam) / lam);
    }
    report.checks.push_back({"market_clearing", worst <= options.tol_clearing,
                             worst, options.tol_clearing});
  }

  double price_of_endowment = 0.0;  // E[zeta * Lambda]
  for (int s = 0; s < S; ++s) {
    price_of_endowment += economy.space().weight(s) * zeta[s] * economy.endowment()[s];
  }

  {  // (ii) budget constraints priced by zeta
    double worst = 0.0;
    for (int m = 0; m < M; ++m) {
      double budget = 0.0;
      for (int s = 0; s < S; ++s) {
        budget += economy.space().weight(s) * zeta[s] *
                  (alloc(m, s) - economy.initial_allocation()(m, s));
      }
      worst = std::max(worst, std::abs(budget));
    }
    const double threshold = options.tol_budget * std::abs(price_of_endowment);
    report.checks.push_back({"budgets", worst <= threshold, worst, threshold});
  }

  {  // (iii) first-order proportionality: du_m / zeta constant = 1/(z w^m)
    double worst = 0.0;
    bool defined = true;
    for (int m = 0; m < M; ++m) {
      if (!(w[m] > 0.0)) {
        defined = false;
        continue;  // interiority check below will fail
      }
      const double ref = 1.0 / (certificate.z * w[m]);
      for (int s = 0; s < S; ++s) {
        const double ratio = economy.agent(m).du(alloc(m, s), s) / zeta[s];
        const double dev = std::abs(ratio / ref - 1.0);
        if (!(dev <= worst)) worst = std::isfinite(dev) ? dev : kInf;
      }
    }
    report.checks.push_back({"foc_proportionality",
                             defined && worst <= options.tol_foc, worst,
                             options.tol_foc});
  }

  report.checks.push_back({"price_integrability", std::isfinite(price_of_endowment),
                           price_of_endowment, kInf});

  {  // (v) E[|U_m(alloc)|] finite
    double worst = 0.0;
    bool all_finite = true;
    for (int m = 0; m < M; ++m) {
      double total = 0.0;
      for (int s = 0; s < S; ++s) {
        total += economy.space().weight(s) * std::abs(economy.agent(m).u(alloc(m, s), s));
      }
      if (!std::isfinite(total)) all_finite = false;
      worst = std::max(worst, total);
    }
    report.checks.push_back({"utility_integrability", all_finite, worst, kInf});
  }

  report.checks.push_back({"interior_weights", w.minCoeff() > 0.0, w.minCoeff(), 0.0});

  {  // (vii) positivity of the state price density
    double lo = zeta.minCoeff();
    bool positive = lo > 0.0 && zeta.allFinite();
    report.checks.push_back({"positive_state_prices", positive, lo, 0.0});
  }

  return report;
}

UniquenessReport check_uniqueness_preconditions(const Economy& economy, const Vec& c_grid) {
  UniquenessReport report;
  const int M = economy.num_agents();
  report.gross_substitute.resize(static_cast<size_t>(M), false);
  for (int m = 0; m < M; ++m) {
    const std::vector<bool> per_state = marginal_times_c_monotone(economy.agent(m), c_grid);
    bool ok = true;
    for (bool b : per_state) ok = ok && b;
    report.gross_substitute[static_cast<size_t>(m)] = ok;
    if (!ok) report.violators.push_back(m);
  }
  report.unique_guaranteed = report.violators.size() <= 1;
  if (report.violators.empty()) {
    for (int m = 0; m < M; ++m) report.m0_candidates.push_back(m);
  } else if (report.violators.size() == 1) {
    report.m0_candidates = report.violators;
  }
  return report;
}

MultiplicityReport probe_multiplicity(const Economy& economy, int n_starts,
                                      int scan_n, const SolveOptions& options) {
  if (n_starts < 1) {
    throw std::invalid_argument("probe_multiplicity: n_starts must be >= 1");
  }
  const int M = economy.num_agents();
  MultiplicityReport report;
  std::vector<EquilibriumRoot> found;

  for (int k = 1; k <= n_starts; ++k) {
    Vec e(M);
    for (int d = 0; d < M; ++d) {
      const double u = halton(k, nth_prime(d));
      e[d] = -std::log1p(-u);
    }
    if (!(e.sum() > 0.0)) e = Vec::Ones(M);
    SolveOptions opts = options;
    opts.start = Vec(e / e.sum());
    const SolveOutcome outcome = solve(economy, opts);
    if (outcome.converged()) {
      found.push_back({normalize_simplex(outcome.certificate.weights),
                       outcome.residual, "start " + std::to_string(k)});
    } else {
      ++report.failed_starts;
    }
  }

  if (M == 2 && scan_n >= 2) {
    // Scan h_1 over the interior segment and bisect every sign change.
    const auto h1 = [&](double t) {
      Vec w(2);
      w << t, 1.0 - t;
      return excess_utility(economy, w)[0];
    };
    double prev_t = 1.0 / (scan_n + 1);
    double prev_v = h1(prev_t);
    for (int i = 2; i <= scan_n; ++i) {
      const double t = static_cast<double>(i) / (scan_n + 1);
      const double v = h1(t);
      if (v == 0.0 || (prev_v < 0.0) != (v < 0.0)) {
        double lo = prev_t, hi = t, vlo = prev_v;
        for (int it = 0; it < 100 && (hi - lo) > 1e-14; ++it) {
          const double mid = 0.5 * (lo + hi);
          const double vm = h1(mid);
          if (vm == 0.0) {
            lo = hi = mid;
          } else if ((vm < 0.0) == (vlo < 0.0)) {
            lo = mid;
            vlo = vm;
          } else {
            hi = mid;
          }
        }
        const double root = 0.5 * (lo + hi);
        Vec w(2);
        w << root, 1.0 - root;
        found.push_back({w, evaluate(economy, w).rel, "scan"});
      }
      prev_t = t;
      prev_v = v;
    }
  }

  // Cluster with L-inf tolerance 1e-6, keeping the lowest-residual member.
  for (const auto& root : found) {
    bool merged = false;
    for (auto& cluster : report.roots) {
      if ((cluster.weights - root.weights).abs().maxCoeff() <= 1e-6) {
        if (root.residual < cluster.residual) {
          cluster.weights = root.weights;
          cluster.residual = root.residual;
          cluster.source = root.source;
        }
        merged = true;
        break;
      }
    }
    if (!merged) report.roots.push_back(root);
  }
  std::sort(report.roots.begin(), report.roots.end(),
            [](const EquilibriumRoot& a, const EquilibriumRoot& b) {
              return a.weights[0] < b.weights[0];
            });
  return report;
}

IntegrabilityReport integrability_report(const Economy& economy, const Vec& w) {
  require_valid_weights(w);
  for (Eigen::Index m = 0; m < w.size(); ++m) {
    if (!(w[m] > 0.0)) {
      throw std::invalid_argument("integrability_report: weights must be interior");
    }
  }
  const int M = economy.num_agents();
  const int S = economy.num_states();
  IntegrabilityReport report;
  report.abs_utility = Vec::Constant(M, std::numeric_limits<double>::quiet_NaN());
  report.marginal_value_of_endowment =
      Vec::Constant(M, std::numeric_limits<double>::quiet_NaN());

  const auto flag_extreme = [&report](double v, const std::string& what) {
    if (!std::isfinite(v) || std::abs(v) > 1e250) {
      report.overflow_risk = true;
      report.notes.push_back(what + " is at the edge of double range (" +
                             format_double(v) + ")");
    }
  };

  // Equal-split domination bound E[sum_m U'_m(Lambda/M) Lambda]; no split
  // required, so it stays computable even when the multiplier over/underflows.
  double bound = 0.0;
  for (int s = 0; s < S; ++s) {
    const double lam = economy.endowment()[s];
    for (int m = 0; m < M; ++m) {
      const double marginal = economy.agent(m).du(lam / M, s);
      if (marginal == 0.0 || !std::isfinite(marginal)) {
        report.overflow_risk = true;
        report.notes.push_back("U'_" + std::to_string(m) + "(Lambda/M) " +
                               (marginal == 0.0 ? "underflows" : "overflows") +
                               " in state '" + economy.space().id(s) + "'");
      }
      bound += economy.space().weight(s) * marginal * lam;
    }
  }
  report.equal_split_bound = bound;
  flag_extreme(bound, "equal-split bound");

  try {
    const ParetoAllocation pareto = pareto_allocation(economy, w);
    for (int m = 0; m < M; ++m) {
      double abs_u = 0.0, marg = 0.0;
      for (int s = 0; s < S; ++s) {
        const double share = pareto.allocation(m, s);
        const double mu = economy.space().weight(s);
        abs_u += mu * std::abs(economy.agent(m).u(share, s));
        const double dum = economy.agent(m).du(share, s);
        if ((dum == 0.0 || !std::isfinite(dum)) && share > 0.0) {
          report.overflow_risk = true;
          report.notes.push_back("U'_" + std::to_string(m) +
                                 "(pi) leaves double range in state '" +
                                 economy.space().id(s) + "'");
        }
        marg += mu * dum * economy.endowment()[s];
      }
      report.abs_utility[m] = abs_u;
      report.marginal_value_of_endowment[m] = marg;
      flag_extreme(abs_u, "E[|U_" + std::to_string(m) + "(pi)|]");
      flag_extreme(marg, "E[U'_" + std::to_string(m) + "(pi) Lambda]");
    }
  } catch (const NumericalError& err) {
    report.overflow_risk = true;
    report.notes.push_back(std::string("Pareto split failed: ") + err.what());
  }
  return report;
}

}  // namespace negishi
