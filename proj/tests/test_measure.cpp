#include <doctest.h>

#include <limits>
#include <random>

#include "negishi/measure.hpp"

using namespace negishi;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

StateSpace two_states(double w1 = 1.0, double w2 = 1.0) {
  Vec w(2);
  w << w1, w2;
  return StateSpace({"s1", "s2"}, w);
}
}  // namespace

TEST_CASE("expectation sums values against weights") {
  const StateSpace space = two_states();
  Vec v(2);
  v << 1.0, 2.0;
  CHECK(expectation(StateFunction(space, v), space) == 3.0);
}

TEST_CASE("expectation returns -inf when any state is -inf") {
  const StateSpace space = two_states();
  Vec v(2);
  v << -kInf, 5.0;
  CHECK(expectation(StateFunction(space, v), space) == -kInf);
}

TEST_CASE("expectation cancels signed values") {
  const StateSpace space = two_states(2.0, 4.0);
  Vec v(2);
  v << 0.5, -0.25;
  CHECK(expectation(StateFunction(space, v), space) == 0.0);
}

TEST_CASE("expectation rejects misaligned lengths") {
  const StateSpace space = two_states();
  Vec v(3);
  v << 1.0, 2.0, 3.0;
  CHECK_THROWS_AS(expectation(v, space), std::invalid_argument);
}

TEST_CASE("state space invariants") {
  Vec w(2);
  w << 1.0, 0.0;
  CHECK_THROWS_AS(StateSpace({"a", "b"}, w), std::invalid_argument);
  w << 1.0, -2.0;
  CHECK_THROWS_AS(StateSpace({"a", "b"}, w), std::invalid_argument);
  w << 1.0, kInf;
  CHECK_THROWS_AS(StateSpace({"a", "b"}, w), std::invalid_argument);
  w << 1.0, 2.0;
  CHECK_THROWS_AS(StateSpace({"a", "a"}, w), std::invalid_argument);
  CHECK_THROWS_AS(StateSpace({}, Vec()), std::invalid_argument);
}

TEST_CASE("state functions reject +inf and NaN") {
  const StateSpace space = two_states();
  Vec v(2);
  v << 1.0, kInf;
  CHECK_THROWS_AS(StateFunction(space, v), std::invalid_argument);
  v << 1.0, std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(StateFunction(space, v), std::invalid_argument);
  v << -kInf, 1.0;  // -inf is a value, not an error
  CHECK_NOTHROW(StateFunction(space, v));
}

TEST_CASE("product_discretize single cell") {
  const StateSpace space = product_discretize({1.0}, {0.0, 1.0});
  CHECK(space.size() == 1);
  CHECK(space.weight(0) == 1.0);
}

TEST_CASE("product_discretize forms product weights") {
  const StateSpace space = product_discretize({0.5, 0.5}, {0.0, 1.0, 3.0});
  REQUIRE(space.size() == 4);
  CHECK(space.weight(0) == 0.5);
  CHECK(space.weight(1) == 1.0);
  CHECK(space.weight(2) == 0.5);
  CHECK(space.weight(3) == 1.0);
}

TEST_CASE("product_discretize scalar products") {
  const StateSpace space = product_discretize({0.2, 0.8}, {0.0, 2.0});
  REQUIRE(space.size() == 2);
  CHECK(space.weight(0) == doctest::Approx(0.4).epsilon(1e-14));
  CHECK(space.weight(1) == doctest::Approx(1.6).epsilon(1e-14));
}

TEST_CASE("product_discretize rejects bad input") {
  CHECK_THROWS_AS(product_discretize({0.5, 0.4}, {0.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(product_discretize({1.0}, {0.0}), std::invalid_argument);
  CHECK_THROWS_AS(product_discretize({1.0}, {0.0, 1.0, 0.5}), std::invalid_argument);
  CHECK_THROWS_AS(product_discretize({0.5, 0.5, 0.0}, {0.0, 1.0}), std::invalid_argument);
}

TEST_CASE("product_discretize total mass") {
  const StateSpace space = product_discretize({0.3, 0.45, 0.25}, {0.5, 0.75, 2.0, 4.5});
  CHECK(space.total_mass() == doctest::Approx(4.5 - 0.5).epsilon(1e-14));
}

TEST_CASE("expectation is linear and monotone on finite functions") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> unif(-5.0, 5.0);
  std::uniform_real_distribution<double> wgt(0.1, 3.0);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 7);
    std::vector<std::string> ids;
    Vec w(n), f(n), g(n);
    for (int s = 0; s < n; ++s) {
      ids.push_back("s" + std::to_string(s));
      w[s] = wgt(rng);
      f[s] = unif(rng);
      g[s] = unif(rng);
    }
    const StateSpace space(ids, w);
    const double a = wgt(rng), b = wgt(rng);
    const double lhs = expectation(Vec(a * f + b * g), space);
    const double rhs = a * expectation(f, space) + b * expectation(g, space);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));

    const Vec bump = f + Vec::Constant(n, 0.25);
    CHECK(expectation(f, space) <= expectation(bump, space));
  }
}

TEST_CASE("expectation monotone with -inf below anything") {
  const StateSpace space = two_states();
  Vec f(2), g(2);
  f << -kInf, 1.0;
  g << -3.0, 1.0;
  CHECK(expectation(f, space) <= expectation(g, space));
}
