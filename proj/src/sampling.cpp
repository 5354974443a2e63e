#include "srma/sampling.hpp"

#include <cmath>
#include <stdexcept>

namespace srma {

double Trajectory::discounted_return(double gamma) const {
  double ret = 0.0;
  double discount = 1.0;
  for (double r : rewards) {
    ret += discount * r;
    discount *= gamma;
  }
  return ret;
}


int sample_horizon(double gamma, Rng& rng) {
  if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("gamma must lie in (0, 1)");
  // std::geometric_distribution counts failures, i.e. has support {0, 1, ...}.
  const double p = 1.0 - std::sqrt(gamma);
  return std::geometric_distribution<int>(p)(rng) + 1;
}

Trajectory rollout(const Environment& env, const PolicyModel<double>& policy, int last_index,
                   Rng& rng) {
  const double start = env.reset(rng);
  return rollout_from(env, policy, start, last_index, rng);
}

Trajectory rollout_from(const Environment& env, const PolicyModel<double>& policy, double start,
                        int last_index, Rng& rng) {
  if (last_index < 0) throw std::invalid_argument("rollout needs a nonnegative last index");
  const auto n = static_cast<std::size_t>(last_index) + 1;
  Trajectory traj;
  traj.horizon = last_index;
  traj.behavior_theta = policy.theta();
  traj.states.reserve(n);
  traj.raw_actions.reserve(n);
  traj.executed_actions.reserve(n);
  traj.rewards.reserve(n);
  traj.behavior_logp.reserve(n);

  double s = start;
  bool done = false;
  for (std::size_t t = 0; t < n; ++t) {
    traj.states.push_back(s);
    const double mu = policy.mean(s);
    if (done) {
      traj.raw_actions.push_back(mu);
      traj.executed_actions.push_back(mu);
      traj.rewards.push_back(0.0);
      traj.behavior_logp.push_back(log_density_residual(policy.family(), policy.sigma(), 0.0));
      continue;
    }
    const double a = sample_action(policy, s, rng);
    const StepOutcome out = env.step(s, a);
    traj.raw_actions.push_back(a);
    traj.executed_actions.push_back(out.executed_action);
    traj.rewards.push_back(out.reward);
    traj.behavior_logp.push_back(log_density_residual(policy.family(), policy.sigma(), a - mu));
    if (out.terminal) {
      done = true;
      traj.terminal_step = static_cast<int>(t);
    }
    s = out.next_state;
  }
  traj.end_state = s;
  return traj;
}

}  // namespace srma
