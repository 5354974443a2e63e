#include "srma/gradients.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace srma {
namespace {

double scored_action(const Trajectory& traj, std::size_t t, ScoredAction scored) {
  return scored == ScoredAction::kRaw ? traj.raw_actions[t] : traj.executed_actions[t];
}

void require_behavior(const Trajectory& traj, const Vec& theta, const char* what) {
  if (traj.behavior_theta.size() != theta.size() || traj.behavior_theta != theta)
    throw std::invalid_argument(std::string(what) +
                                ": trajectory was not generated under the given parameters");
}

}  // namespace

Vec pg_estimate(const Trajectory& traj, const PolicyModel<double>& policy, double gamma,
                ScoredAction scored) {
  require_behavior(traj, policy.theta(), "pg_estimate");
  const double root_gamma = std::sqrt(gamma);
  Vec running = Vec::Zero(policy.dim());
  Vec grad = Vec::Zero(policy.dim());
  double discount = 1.0;
  for (std::size_t t = 0; t < traj.size(); ++t) {
    const Vec phi = policy.features()(traj.states[t]);
    const double r = scored_action(traj, t, scored) - phi.dot(policy.theta());
    running += score_weight(policy.family(), policy.sigma(), r) * phi;
    grad += (discount * traj.rewards[t]) * running;
    discount *= root_gamma;
  }
  return grad;
}

IsWeights is_weights(const Trajectory& traj, const PolicyModel<double>& policy, const Vec& theta_old,
                     const Vec& theta_new, double w_max, ScoredAction scored) {
  require_behavior(traj, theta_new, "is_weights");
  IsWeights out;
  out.w.reserve(traj.size());
  out.log_w.reserve(traj.size());
  double log_w = 0.0;
  for (std::size_t t = 0; t < traj.size(); ++t) {
    const Vec phi = policy.features()(traj.states[t]);
    const double a = scored_action(traj, t, scored);
    const double logp_old = log_density_residual(policy.family(), policy.sigma(), a - phi.dot(theta_old));
    const double logp_new =
        scored == ScoredAction::kRaw
            ? traj.behavior_logp[t]
            : log_density_residual(policy.family(), policy.sigma(), a - phi.dot(theta_new));
    log_w += logp_old - logp_new;
    out.log_w.push_back(log_w);
    out.w.push_back(std::min(std::exp(log_w), w_max));
  }
  return out;
}

Vec pg_estimate_is(const Trajectory& traj, const PolicyModel<double>& policy, const Vec& theta_old,
                   const Vec& theta_new, double gamma, double w_max, ScoredAction scored) {
  const IsWeights weights = is_weights(traj, policy, theta_old, theta_new, w_max, scored);
  const double root_gamma = std::sqrt(gamma);
  Vec running = Vec::Zero(policy.dim());
  Vec grad = Vec::Zero(policy.dim());
  double discount = 1.0;
  for (std::size_t t = 0; t < traj.size(); ++t) {
    const Vec phi = policy.features()(traj.states[t]);
    const double r = scored_action(traj, t, scored) - phi.dot(theta_old);
    running += score_weight(policy.family(), policy.sigma(), r) * phi;
    grad += (discount * traj.rewards[t] * weights.w[t]) * running;
    discount *= root_gamma;
  }
  return grad;
}

GradientState tracker_update(const GradientState& state, const Vec& g_new, const Vec& g_old_is) {
  if (g_new.size() != state.g_hat.size() || g_old_is.size() != state.g_hat.size())
    throw std::invalid_argument("tracker_update: dimension mismatch");
  GradientState next;
  next.beta = state.beta;
  next.k = state.k + 1;
  next.g_hat = (1.0 - state.beta) * (state.g_hat - g_old_is) + g_new;
  return next;
}

}  // namespace srma
