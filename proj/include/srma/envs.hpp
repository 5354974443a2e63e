#pragma once

#include "srma/policies.hpp"
#include "srma/types.hpp"

#include <cmath>
#include <cstddef>
#include <memory>
#include <string>
#include <string_view>

namespace srma {

struct StepOutcome {
  double next_state = 0.0;
  double reward = 0.0;
  bool terminal = false;
  double executed_action = 0.0;
};

/// Scalar-state, scalar-action MDP. Implementations are stateless value
/// objects: the caller owns the state and passes it back into `step`.
class Environment {
 public:
  virtual ~Environment() = default;
  virtual std::string name() const = 0;
  virtual double reset(Rng& rng) const = 0;
  virtual StepOutcome step(double state, double raw_action) const = 0;
  /// Nominal state interval, used to place feature centers.
  virtual double state_lo() const = 0;
  virtual double state_hi() const = 0;
};

struct PmcParams {
  double lo = -4.0;
  double hi = 3.709;
  double action_bound = 6.0;
  double dt = 0.05;
  double goal_band = 0.05;
  double spurious_goal = 2.6;
  double goal_reward = 500.0;
  double spurious_reward = 10.0;
  double init_lo = 1.15;
  double init_hi = 2.0;
};

/// Pathological Mountain Car: the action is the velocity. A distant terminal
/// goal at the left wall pays 500, a nearby non-terminal band around 2.6 pays
/// 10, and every step costs the squared executed action.
class PathologicalMountainCar final : public Environment {
 public:
  explicit PathologicalMountainCar(PmcParams params = {}) : params_(params) {}

  std::string name() const override { return "pmc"; }
  double reset(Rng& rng) const override;
  StepOutcome step(double state, double raw_action) const override;
  double state_lo() const override { return params_.lo; }
  double state_hi() const override { return params_.hi; }

  const PmcParams& params() const { return params_; }
  bool in_left_goal(double s) const { return s <= params_.lo + params_.goal_band; }
  bool in_spurious_goal(double s) const {
    return std::abs(s - params_.spurious_goal) <= params_.goal_band;
  }

 private:
  PmcParams params_;
};

/// s' = 0.9 s + 0.1 a, r = -s^2 - 0.01 a^2, never terminal. Used by oracles:
/// under a linear Gaussian policy its discounted value has a closed form.
class LinearChain final : public Environment {
 public:
  explicit LinearChain(double initial_state = 1.0) : initial_state_(initial_state) {}

  std::string name() const override { return "chain"; }
  double reset(Rng&) const override { return initial_state_; }
  StepOutcome step(double state, double raw_action) const override;
  double state_lo() const override { return -2.0; }
  double state_hi() const override { return 2.0; }

  double initial_state() const { return initial_state_; }

 private:
  double initial_state_;
};

/// "pmc" or "chain"; throws std::invalid_argument otherwise.
std::unique_ptr<Environment> make_environment(std::string_view name);

/// Default feature map for an environment: 8 radial-basis centers spread
/// over the state range, bandwidth 1, norm cap 1.
FeatureMap<double> default_features(const Environment& env);

/// Monte-Carlo discounted value: mean over n_traj rollouts of
/// sum_t gamma^t r_t, stopping at a terminal step or once gamma^t < 1e-8.
double estimate_value(const Environment& env, const PolicyModel<double>& policy, double gamma,
                      std::size_t n_traj, Rng& rng);

/// Closed-form discounted value of LinearChain under the Gaussian policy
/// a = k s + sigma * noise.
double chain_linear_gaussian_value(double initial_state, double gain, double sigma, double gamma);

}  // namespace srma
