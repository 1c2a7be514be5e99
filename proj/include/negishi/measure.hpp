#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

namespace negishi {

using Vec = Eigen::ArrayXd;
// Agent-by-state data: rows are agents, columns are states.
using Mat = Eigen::ArrayXXd;

// Finite weighted state space. Weights form a measure, not a probability:
// they must be strictly positive and finite but need not sum to one.
class StateSpace {
public:
  StateSpace(std::vector<std::string> ids, Vec weights);

  int size() const { return static_cast<int>(weights_.size()); }
  const std::vector<std::string>& ids() const { return ids_; }
  const std::string& id(int s) const { return ids_[static_cast<size_t>(s)]; }
  const Vec& weights() const { return weights_; }
  double weight(int s) const { return weights_[s]; }
  double total_mass() const { return weights_.sum(); }

private:
  std::vector<std::string> ids_;
  Vec weights_;
};

// A state function takes one extended-real value per state. Values live in
// [-inf, inf): -inf is allowed, +inf and NaN are rejected at construction.
class StateFunction {
public:
  StateFunction(const StateSpace& space, Vec values);

  int size() const { return static_cast<int>(values_.size()); }
  const Vec& values() const { return values_; }
  double operator[](int s) const { return values_[s]; }

private:
  Vec values_;
};

// E[f] = sum_s f(s) mu(s), computed in state order. Returns -inf as soon as
// the negative part is infinite, i.e. whenever any state carries -inf.
double expectation(const StateFunction& f, const StateSpace& space);
double expectation(const Vec& values, const StateSpace& space);

// State space over pairs (omega_i, t_j) with weight P[omega_i] * dt_j, where
// dt_j is the length of the j-th grid interval. Probabilities must sum to one
// within 1e-12 and the time grid must be strictly increasing with >= 2 points.
StateSpace product_discretize(const std::vector<double>& probabilities,
                              const std::vector<double>& time_grid);

}  // namespace negishi
