#include "srma/envs.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace srma {

double PathologicalMountainCar::reset(Rng& rng) const {
  return params_.init_lo + (params_.init_hi - params_.init_lo) * uniform_open(rng);
}

StepOutcome PathologicalMountainCar::step(double state, double raw_action) const {
  StepOutcome out;
  const double a = std::clamp(raw_action, -params_.action_bound, params_.action_bound);
  out.executed_action = a;
  out.next_state = std::clamp(state + params_.dt * a, params_.lo, params_.hi);
  const double cost = a * a;
  if (in_left_goal(out.next_state)) {
    out.reward = params_.goal_reward - cost;
    out.terminal = true;
  } else if (in_spurious_goal(out.next_state)) {
    out.reward = params_.spurious_reward - cost;
  } else {
    out.reward = -cost;
  }
  return out;
}

StepOutcome LinearChain::step(double state, double raw_action) const {
  StepOutcome out;
  out.executed_action = raw_action;
  out.next_state = 0.9 * state + 0.1 * raw_action;
  out.reward = -state * state - 0.01 * raw_action * raw_action;
  return out;
}

std::unique_ptr<Environment> make_environment(std::string_view name) {
  if (name == "pmc") return std::make_unique<PathologicalMountainCar>();
  if (name == "chain") return std::make_unique<LinearChain>();
  throw std::invalid_argument("unknown environment '" + std::string(name) + "'");
}

FeatureMap<double> default_features(const Environment& env) {
  return FeatureMap<double>::evenly_spaced(env.state_lo(), env.state_hi(), 8, 1.0, 1.0);
}

double estimate_value(const Environment& env, const PolicyModel<double>& policy, double gamma,
                      std::size_t n_traj, Rng& rng) {
  if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("gamma must lie in (0, 1)");
  if (n_traj == 0) return 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < n_traj; ++i) {
    double s = env.reset(rng);
    double discount = 1.0;
    double ret = 0.0;
    while (discount >= 1e-8) {
      const StepOutcome out = env.step(s, sample_action(policy, s, rng));
      ret += discount * out.reward;
      if (out.terminal) break;
      s = out.next_state;
      discount *= gamma;
    }
    total += ret;
  }
  return total / static_cast<double>(n_traj);
}

double chain_linear_gaussian_value(double initial_state, double gain, double sigma, double gamma) {
  // v_t = E[s_t^2] obeys v_{t+1} = rho^2 v_t + 0.01 sigma^2 with rho = 0.9 + 0.1 k,
  // and E[r_t] = -(1 + 0.01 k^2) v_t - 0.01 sigma^2.
  const double rho = 0.9 + 0.1 * gain;
  if (gamma * rho * rho >= 1.0) throw std::invalid_argument("closed loop is not discount-stable");
  const double noise = 0.01 * sigma * sigma;
  const double sum_v = (initial_state * initial_state + gamma * noise / (1.0 - gamma)) /
                       (1.0 - gamma * rho * rho);
  return -(1.0 + 0.01 * gain * gain) * sum_v - noise / (1.0 - gamma);
}

}  // namespace srma
