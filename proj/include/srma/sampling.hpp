#pragma once

#include "srma/envs.hpp"
#include "srma/policies.hpp"

#include <vector>

namespace srma {

/// One rollout with last decision index T: every array has T + 1 entries.
/// After a terminal step the state is frozen, rewards are zero and the
/// recorded action is the policy mean (so it contributes no score).
struct Trajectory {
  int horizon = 0;
  std::vector<double> states;
  std::vector<double> raw_actions;
  std::vector<double> executed_actions;
  std::vector<double> rewards;
  std::vector<double> behavior_logp;
  Vec behavior_theta;
  /// Index of the terminal step, or -1 if the episode never terminated.
  int terminal_step = -1;
  /// State reached after the last recorded step.
  double end_state = 0.0;

  std::size_t size() const { return rewards.size(); }
  double discounted_return(double gamma) const;
  bool terminated() const { return terminal_step >= 0; }
};

/// Geometric horizon on {1, 2, ...} with success probability p = 1 - sqrt(gamma),
/// so E[T] = 1/p and E[T^2] = (1 + sqrt(gamma)) / (1 - sqrt(gamma))^2.
int sample_horizon(double gamma, Rng& rng);

/// Runs decision steps t = 0..last_index under `policy`, starting from env.reset.
Trajectory rollout(const Environment& env, const PolicyModel<double>& policy, int last_index,
                   Rng& rng);

/// Same, from a given start state instead of env.reset.
Trajectory rollout_from(const Environment& env, const PolicyModel<double>& policy, double start,
                        int last_index, Rng& rng);

}  // namespace srma
