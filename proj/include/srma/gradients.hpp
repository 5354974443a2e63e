#pragma once

#include "srma/policies.hpp"
#include "srma/sampling.hpp"

#include <limits>
#include <vector>

namespace srma {

/// Which recorded action the score and the importance weights are evaluated at.
/// Raw actions keep the estimator unbiased; executed (clipped) actions are
/// available for comparison.
enum class ScoredAction { kRaw, kExecuted };

inline constexpr double kDefaultWeightClip = 100.0;
inline constexpr double kNoWeightClip = std::numeric_limits<double>::infinity();

/// Random-horizon policy gradient
///   sum_t gamma^{t/2} r_t * sum_{tau <= t} grad log pi_theta(a_tau | s_tau)
/// at theta = policy.theta(). Throws std::invalid_argument if the trajectory
/// was generated under different parameters.
Vec pg_estimate(const Trajectory& traj, const PolicyModel<double>& policy, double gamma,
                ScoredAction scored = ScoredAction::kRaw);

/// Per-step cumulative importance weights pi_old / pi_new over a trajectory
/// drawn from pi_new. `log_w` is unclipped; `w` is exp(log_w) clipped to w_max.
struct IsWeights {
  std::vector<double> w;
  std::vector<double> log_w;
};

IsWeights is_weights(const Trajectory& traj, const PolicyModel<double>& policy, const Vec& theta_old,
                     const Vec& theta_new, double w_max = kDefaultWeightClip,
                     ScoredAction scored = ScoredAction::kRaw);

/// Gradient at theta_old estimated from a trajectory drawn under theta_new:
///   sum_t gamma^{t/2} r_t w_t * sum_{tau <= t} grad log pi_old(a_tau | s_tau).
Vec pg_estimate_is(const Trajectory& traj, const PolicyModel<double>& policy, const Vec& theta_old,
                   const Vec& theta_new, double gamma, double w_max = kDefaultWeightClip,
                   ScoredAction scored = ScoredAction::kRaw);

struct GradientState {
  Vec g_hat;
  double beta = 1.0;
  long k = 0;

  static GradientState zero(Eigen::Index dim, double beta) {
    return GradientState{Vec::Zero(dim), beta, 0};
  }
};

/// g_hat <- (1 - beta) (g_hat - g_old_is) + g_new; k <- k + 1.
GradientState tracker_update(const GradientState& state, const Vec& g_new, const Vec& g_old_is);

}  // namespace srma
