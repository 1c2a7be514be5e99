#include "negishi/measure.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <unordered_set>

namespace negishi {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

StateSpace::StateSpace(std::vector<std::string> ids, Vec weights)
    : ids_(std::move(ids)), weights_(std::move(weights)) {
  if (weights_.size() == 0) {
    throw std::invalid_argument("StateSpace: at least one state is required");
  }
  if (static_cast<Eigen::Index>(ids_.size()) != weights_.size()) {
    throw std::invalid_argument("StateSpace: ids and weights differ in length");
  }
  for (Eigen::Index s = 0; s < weights_.size(); ++s) {
    if (!(weights_[s] > 0.0) || !std::isfinite(weights_[s])) {
      throw std::invalid_argument("StateSpace: weight of state '" +
                                  ids_[static_cast<size_t>(s)] +
                                  "' must be strictly positive and finite");
    }
  }
  std::unordered_set<std::string> seen;
  for (const auto& id : ids_) {
    if (!seen.insert(id).second) {
      throw std::invalid_argument("StateSpace: duplicate state id '" + id + "'");
    }
  }
}

StateFunction::StateFunction(const StateSpace& space, Vec values)
    : values_(std::move(values)) {
  if (values_.size() != space.size()) {
    throw std::invalid_argument("StateFunction: length " +
                                std::to_string(values_.size()) +
                                " does not match state space of size " +
                                std::to_string(space.size()));
  }
  for (Eigen::Index s = 0; s < values_.size(); ++s) {
    const double v = values_[s];
    if (std::isnan(v) || v == kInf) {
      throw std::invalid_argument("StateFunction: value at state '" +
                                  space.id(static_cast<int>(s)) +
                                  "' must lie in [-inf, inf)");
    }
  }
}

double expectation(const Vec& values, const StateSpace& space) {
  if (values.size() != space.size()) {
    throw std::invalid_argument("expectation: function and state space are misaligned");
  }
  // Any state at -inf makes E[min(f,0)] = -inf because all weights are positive.
  for (Eigen::Index s = 0; s < values.size(); ++s) {
    if (values[s] == -kInf) return -kInf;
  }
  double total = 0.0;
  for (Eigen::Index s = 0; s < values.size(); ++s) {
    total += values[s] * space.weights()[s];
  }
  return total;
}

double expectation(const StateFunction& f, const StateSpace& space) {
  return expectation(f.values(), space);
}

StateSpace product_discretize(const std::vector<double>& probabilities,
                              const std::vector<double>& time_grid) {
  if (probabilities.empty()) {
    throw std::invalid_argument("product_discretize: no probabilities given");
  }
  double mass = 0.0;
  for (double p : probabilities) {
    if (!(p > 0.0) || !std::isfinite(p)) {
      throw std::invalid_argument("product_discretize: probabilities must be strictly positive");
    }
    mass += p;
  }
  if (std::abs(mass - 1.0) > 1e-12) {
    throw std::invalid_argument("product_discretize: probabilities sum to " +
                                std::to_string(mass) + ", expected 1");
  }
  if (time_grid.size() < 2) {
    throw std::invalid_argument("product_discretize: time grid needs at least 2 points");
  }
  for (size_t j = 0; j + 1 < time_grid.size(); ++j) {
    if (!(time_grid[j] < time_grid[j + 1])) {
      throw std::invalid_argument("product_discretize: time grid must be strictly increasing");
    }
  }

  const size_t n_omega = probabilities.size();
  const size_t n_cells = time_grid.size() - 1;
  std::vector<std::string> ids;
  Vec weights(static_cast<Eigen::Index>(n_omega * n_cells));
  Eigen::Index k = 0;
  for (size_t i = 0; i < n_omega; ++i) {
    for (size_t j = 0; j < n_cells; ++j) {
      ids.push_back("w" + std::to_string(i) + ":t" + std::to_string(j));
      weights[k++] = probabilities[i] * (time_grid[j + 1] - time_grid[j]);
    }
  }
  return StateSpace(std::move(ids), std::move(weights));
}

}  // namespace negishi
