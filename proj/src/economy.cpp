#include "negishi/economy.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace negishi {

Economy::Economy(StateSpace space, std::vector<UtilityField> agents,
                 StateFunction endowment, Mat initial_allocation)
    : space_(std::move(space)),
      agents_(std::move(agents)),
      endowment_(std::move(endowment)),
      initial_allocation_(std::move(initial_allocation)) {
  const int n_states = space_.size();
  const int n_agents = static_cast<int>(agents_.size());
  if (n_agents < 1) {
    throw std::invalid_argument("Economy: at least one agent is required");
  }
  for (int m = 0; m < n_agents; ++m) {
    if (agents_[static_cast<size_t>(m)].states() != n_states) {
      throw std::invalid_argument("Economy: agent " + std::to_string(m) +
                                  " utility field does not match the state space");
    }
  }
  if (endowment_.size() != n_states) {
    throw std::invalid_argument("Economy: endowment is misaligned with the state space");
  }
  for (int s = 0; s < n_states; ++s) {
    if (!(endowment_[s] > 0.0) || !std::isfinite(endowment_[s])) {
      throw std::invalid_argument("Economy: total endowment must be strictly positive, state '" +
                                  space_.id(s) + "' has " + std::to_string(endowment_[s]));
    }
  }
  if (initial_allocation_.rows() != n_agents || initial_allocation_.cols() != n_states) {
    throw std::invalid_argument("Economy: initial allocation must be agents x states");
  }
  for (int m = 0; m < n_agents; ++m) {
    bool any_positive = false;
    for (int s = 0; s < n_states; ++s) {
      const double a = initial_allocation_(m, s);
      if (!(a >= 0.0) || !std::isfinite(a)) {
        throw std::invalid_argument("Economy: initial allocation entries must be finite and >= 0");
      }
      if (a > 0.0) any_positive = true;
    }
    if (!any_positive) {
      throw std::invalid_argument(
          "Economy: agent " + std::to_string(m) +
          " has an identically zero initial endowment; every agent must start "
          "with a nonzero claim on the total endowment");
    }
  }
  for (int s = 0; s < n_states; ++s) {
    const double col = initial_allocation_.col(s).sum();
    if (std::abs(col - endowment_[s]) > 1e-12 * endowment_[s]) {
      throw std::invalid_argument("Economy: initial allocation does not exhaust the endowment in state '" +
                                  space_.id(s) + "'");
    }
  }
}

}  // namespace negishi
