#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "negishi/utility.hpp"

using namespace negishi;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

TEST_CASE("crra closed forms") {
  const UtilityField f = UtilityField::crra(1, 2.0);
  CHECK(f.u(2.0, 0) == doctest::Approx(-0.5).epsilon(1e-15));
  CHECK(f.du(2.0, 0) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(f.inv_du(0.25, 0) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(f.u_at_zero(0) == -kInf);
  CHECK(f.u(0.0, 0) == -kInf);

  const UtilityField g = UtilityField::crra(1, 0.5);
  CHECK(g.u(4.0, 0) == doctest::Approx(4.0).epsilon(1e-15));  // 2*sqrt(4)
  CHECK(g.u_at_zero(0) == 0.0);
  CHECK(g.u(0.0, 0) == 0.0);
}

TEST_CASE("log closed forms") {
  const UtilityField f = UtilityField::log_family(1);
  CHECK(f.u(std::exp(1.0), 0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(f.du(4.0, 0) == 0.25);
  CHECK(f.inv_du(0.25, 0) == 4.0);
  CHECK(f.u_at_zero(0) == -kInf);
}

TEST_CASE("per-state scale multiplies utility and marginals") {
  Vec scale(2);
  scale << 2.0, 5.0;
  const UtilityField f = UtilityField::crra(2, 2.0, scale);
  CHECK(f.u(3.0, 1) == doctest::Approx(5.0 * (-1.0 / 3.0)).epsilon(1e-15));
  CHECK(f.du(3.0, 1) == doctest::Approx(5.0 / 9.0).epsilon(1e-15));
  CHECK(f.inv_du(f.du(3.0, 1), 1) == doctest::Approx(3.0).epsilon(1e-13));

  const UtilityField g = UtilityField::log_family(2, scale);
  CHECK(g.du(4.0, 0) == 0.5);
  CHECK(g.inv_du(0.5, 0) == 4.0);
}

TEST_CASE("gamma = 1 is rejected, not aliased to log") {
  CHECK_THROWS_AS(UtilityField::crra(1, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(UtilityField::crra(1, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(UtilityField::crra(1, -2.0), std::invalid_argument);
  CHECK_NOTHROW(UtilityField::crra(1, 1.0 + 1e-9));
}

TEST_CASE("scale must be positive and aligned") {
  Vec bad(2);
  bad << 1.0, 0.0;
  CHECK_THROWS_AS(UtilityField::crra(2, 2.0, bad), std::invalid_argument);
  Vec wrong_len(3);
  wrong_len << 1.0, 1.0, 1.0;
  CHECK_THROWS_AS(UtilityField::log_family(2, wrong_len), std::invalid_argument);
}

TEST_CASE("validate_field passes the analytic families") {
  const Vec grid = default_check_grid();
  for (const UtilityField& f :
       {UtilityField::crra(2, 2.0), UtilityField::crra(2, 0.5),
        UtilityField::crra(2, 8.0), UtilityField::log_family(2)}) {
    const FieldValidationReport report = validate_field(f, grid);
    CHECK(report.pass());
    for (const auto& st : report.states) {
      CHECK(st.inverse_max_rel_error <= 1e-12);
    }
  }
  // log reports the -inf limit at zero
  const auto log_report = validate_field(UtilityField::log_family(1), grid);
  CHECK(log_report.states[0].u_at_zero_is_minus_inf);
}

TEST_CASE("validate_field flags a capped marginal") {
  // du(c) = min(1/c, 10): the marginal stops climbing near zero, violating the
  // Inada condition there.
  const auto u = [](double c, int) {
    return c >= 0.1 ? std::log(c) : std::log(0.1) + 10.0 * (c - 0.1);
  };
  const auto du = [](double c, int) { return std::min(1.0 / c, 10.0); };
  const auto inv = [](double y, int) { return 1.0 / y; };
  const UtilityField broken =
      UtilityField::custom(1, u, du, inv, Vec::Constant(1, -kInf), "capped");
  const FieldValidationReport report = validate_field(broken, default_check_grid());
  CHECK_FALSE(report.states[0].inada_at_zero);
  CHECK(report.states[0].inada_at_infinity);
  CHECK_FALSE(report.pass());
}

TEST_CASE("concavity bound closed forms") {
  // log, c = 1: 1 <= 2 ln 2
  const UtilityField lg = UtilityField::log_family(1);
  CHECK(1.0 * lg.du(1.0, 0) <= 2.0 * (lg.u(1.0, 0) - lg.u(0.5, 0)));
  CHECK(2.0 * (lg.u(1.0, 0) - lg.u(0.5, 0)) == doctest::Approx(2.0 * std::log(2.0)));

  // crra(0.5), c = 4: 2 <= 2(2*2 - 2*sqrt(2))
  const UtilityField h = UtilityField::crra(1, 0.5);
  CHECK(4.0 * h.du(4.0, 0) == doctest::Approx(2.0));
  CHECK(2.0 * (h.u(4.0, 0) - h.u(2.0, 0)) ==
        doctest::Approx(2.0 * (4.0 - 2.0 * std::sqrt(2.0))));

  // crra(3), c = 1: 1 <= 3
  const UtilityField k = UtilityField::crra(1, 3.0);
  CHECK(1.0 * k.du(1.0, 0) == doctest::Approx(1.0));
  CHECK(2.0 * (k.u(1.0, 0) - k.u(0.5, 0)) == doctest::Approx(3.0));
}

TEST_CASE("concavity bound holds for built-ins on the full grid") {
  const Vec grid = default_check_grid();
  for (const UtilityField& f :
       {UtilityField::crra(1, 0.5), UtilityField::crra(1, 2.0),
        UtilityField::crra(1, 3.0), UtilityField::crra(1, 8.0),
        UtilityField::log_family(1)}) {
    const ConcavityBoundReport report = concavity_bound_check(f, grid);
    CHECK(report.pass);
  }
}

TEST_CASE("c u'(c) monotonicity classification") {
  const Vec grid = default_check_grid();
  CHECK(marginal_times_c_monotone(UtilityField::crra(1, 0.5), grid)[0]);
  CHECK(marginal_times_c_monotone(UtilityField::log_family(1), grid)[0]);
  CHECK_FALSE(marginal_times_c_monotone(UtilityField::crra(1, 2.0), grid)[0]);
}

TEST_CASE("inverse marginal is consistent over twelve decades") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> gammas(0.2, 9.0);
  const Vec grid = log_spaced_grid(1e-6, 1e6, 121);
  for (int trial = 0; trial < 20; ++trial) {
    double gamma = gammas(rng);
    if (std::abs(gamma - 1.0) < 1e-3) gamma = 1.5;
    const UtilityField f = UtilityField::crra(1, gamma);
    for (Eigen::Index i = 0; i < grid.size(); ++i) {
      const double c = grid[i];
      CHECK(f.inv_du(f.du(c, 0), 0) == doctest::Approx(c).epsilon(1e-12));
    }
  }
}

TEST_CASE("marginal agrees with a central difference of u") {
  const Vec grid = log_spaced_grid(1e-3, 1e3, 25);
  for (const UtilityField& f :
       {UtilityField::crra(1, 0.5), UtilityField::crra(1, 2.0),
        UtilityField::crra(1, 6.0), UtilityField::log_family(1)}) {
    for (Eigen::Index i = 0; i < grid.size(); ++i) {
      const double c = grid[i];
      const double h = 1e-5 * c;
      const double fd = (f.u(c + h, 0) - f.u(c - h, 0)) / (2.0 * h);
      CHECK(std::abs(f.du(c, 0) - fd) <= 1e-6 * f.du(c, 0));
    }
  }
}
