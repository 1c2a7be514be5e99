#pragma once

#include <vector>

#include "negishi/measure.hpp"
#include "negishi/utility.hpp"

namespace negishi {

// Exchange economy primitives: a finite state space, one utility field per
// agent, the total endowment Lambda > 0 and the initial allocation of Lambda.
// Validated on construction:
//   - Lambda(s) > 0 in every state
//   - every agent's initial endowment has at least one strictly positive entry
//   - the initial allocation columns sum to Lambda (1e-12 relative)
class Economy {
public:
  Economy(StateSpace space, std::vector<UtilityField> agents,
          StateFunction endowment, Mat initial_allocation);

  int num_agents() const { return static_cast<int>(agents_.size()); }
  int num_states() const { return space_.size(); }
  const StateSpace& space() const { return space_; }
  const std::vector<UtilityField>& agents() const { return agents_; }
  const UtilityField& agent(int m) const { return agents_[static_cast<size_t>(m)]; }
  const StateFunction& endowment() const { return endowment_; }
  const Mat& initial_allocation() const { return initial_allocation_; }

private:
  StateSpace space_;
  std::vector<UtilityField> agents_;
  StateFunction endowment_;
  Mat initial_allocation_;
};

}  // namespace negishi
