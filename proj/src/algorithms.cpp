#include "srma/algorithms.hpp"

#include "srma/sampling.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace srma {
namespace {

constexpr std::uint64_t kEvalStreamSalt = 0xe7a1;

enum class Update { kTracked, kFresh, kPlain };

bool uses_tracking(Algorithm a) { return a == Algorithm::kSrma || a == Algorithm::kStorm; }

/// Fixed evaluation horizon: discount weight below 1e-8 past the last index.
int eval_last_index(double gamma) {
  const double steps = std::ceil(std::log(1e-8) / std::log(gamma));
  return static_cast<int>(std::clamp(steps, 1.0, 100000.0));
}

struct Evaluation {
  double mean_return = 0;
  bool reached_terminal = false;
};

Evaluation evaluate(const AlgoConfig& cfg, const Environment& env, const PolicyModel<double>& policy,
                    Rng& rng) {
  Evaluation out;
  const int last = eval_last_index(cfg.gamma);
  for (int i = 0; i < cfg.eval_rollouts; ++i) {
    if (cfg.eval_policy == EvalPolicy::kSample) {
      const Trajectory traj = rollout(env, policy, last, rng);
      out.mean_return += traj.discounted_return(cfg.gamma);
      out.reached_terminal = out.reached_terminal || traj.terminated();
      continue;
    }
    double s = env.reset(rng);
    double discount = 1.0;
    for (int t = 0; t <= last; ++t) {
      const StepOutcome step = env.step(s, policy.mean(s));
      out.mean_return += discount * step.reward;
      if (step.terminal) {
        out.reached_terminal = true;
        break;
      }
      s = step.next_state;
      discount *= cfg.gamma;
    }
  }
  out.mean_return /= cfg.eval_rollouts;
  return out;
}

RunResult run_loop(const AlgoConfig& cfg, const Environment& env, const FeatureMap<double>& features,
                   Update update) {
  cfg.validate();
  if (update != Update::kTracked && cfg.algorithm == Algorithm::kStorm)
    throw std::invalid_argument("STORM runs through the tracked loop");
  if (update == Update::kPlain && cfg.geometry.kind != GeometryKind::kEuclidean)
    throw std::invalid_argument("RPG takes plain gradient steps and needs a Euclidean geometry");

  const Eigen::Index dim = features.dim();
  Vec theta = cfg.theta0.value_or(Vec::Zero(dim));
  if (theta.size() != dim) throw std::invalid_argument("theta0 does not match the feature dimension");
  Vec theta_prev = theta;
  const bool euclidean = cfg.geometry.kind == GeometryKind::kEuclidean;
  Rng rng(cfg.seed);
  Rng eval_rng(derive_seed(cfg.seed, kEvalStreamSalt));
  GradientState tracker = GradientState::zero(dim, cfg.beta);

  RunResult result;
  result.records.reserve(static_cast<std::size_t>(cfg.iterations));
  for (long k = 1; k <= cfg.iterations; ++k) {
    const auto start = std::chrono::steady_clock::now();
    RunRecord rec;
    rec.k = k;
    rec.seed = cfg.seed;
    rec.algorithm = to_string(cfg.algorithm);
    try {
      const PolicyModel<double> policy(cfg.family, theta, cfg.sigma, features);
      Vec g_new = Vec::Zero(dim);
      Vec g_old = Vec::Zero(dim);
      std::vector<double> batch_states;
      for (int b = 0; b < cfg.batch_size; ++b) {
        // T_k decision steps t = 0..T_k - 1.
        const int horizon = sample_horizon(cfg.gamma, rng);
        const Trajectory traj = rollout(env, policy, horizon - 1, rng);
        g_new += pg_estimate(traj, policy, cfg.gamma, cfg.scored);
        if (update == Update::kTracked)
          g_old += pg_estimate_is(traj, policy, theta_prev, theta, cfg.gamma, cfg.w_max, cfg.scored);
        rec.ret += traj.discounted_return(cfg.gamma);
        rec.reached_terminal = rec.reached_terminal || traj.terminated();
        if (b == 0) rec.final_state = traj.end_state;
        if (!euclidean) batch_states.insert(batch_states.end(), traj.states.begin(), traj.states.end());
      }
      if (cfg.batch_size > 1) {
        g_new /= cfg.batch_size;
        g_old /= cfg.batch_size;
        rec.ret /= cfg.batch_size;
      }

      if (update == Update::kTracked) {
        if (k == 1 && cfg.warm_start_tracker) {
          tracker.g_hat = g_new;
          tracker.k = 1;
        } else {
          tracker = tracker_update(tracker, g_new, g_old);
        }
      } else {
        tracker.g_hat = g_new;
        tracker.k = k;
      }
      const Vec& g_hat = tracker.g_hat;
      if (!g_hat.allFinite()) throw NumericalDivergence("gradient estimate is not finite");

      Vec next;
      Vec breg_grad;
      if (euclidean) {
        next = theta + cfg.eta * g_hat;
        breg_grad = g_hat;
      } else {
        const BregmanGeometry geom = cfg.geometry.with_states(features, std::move(batch_states));
        next = prox_step(geom, g_hat, theta, cfg.eta);
        breg_grad = (next - theta) / cfg.eta;
      }
      rec.ghat_norm = g_hat.norm();
      rec.breg_grad_norm = breg_grad.norm();
      rec.theta_norm = next.norm();
      if (!next.allFinite() || !(rec.theta_norm <= kDivergenceNorm))
        throw NumericalDivergence("parameter norm exceeded " + std::to_string(kDivergenceNorm));
      if (!std::isfinite(rec.ret) || !std::isfinite(rec.breg_grad_norm))
        throw NumericalDivergence("non-finite iteration metrics");

      theta_prev = theta;
      theta = next;

      if (cfg.eval_every > 0 && k % cfg.eval_every == 0) {
        const Evaluation ev = evaluate(cfg, env, policy.with_theta(theta), eval_rng);
        rec.eval_return = ev.mean_return;
        rec.reached_terminal = rec.reached_terminal || ev.reached_terminal;
      }
    } catch (const NumericalDivergence& e) {
      rec.diverged = true;
      result.divergence_reason = e.what();
    } catch (const InnerSolverDiverged& e) {
      rec.diverged = true;
      result.divergence_reason = e.what();
    }
    if (cfg.timing)
      rec.wall_ms =
          std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    result.records.push_back(std::move(rec));
    if (result.records.back().diverged) {
      result.diverged = true;
      break;
    }
  }
  result.theta = theta;
  return result;
}

}  // namespace

Algorithm parse_algorithm(std::string_view name) {
  if (name == "srma") return Algorithm::kSrma;
  if (name == "sma") return Algorithm::kSma;
  if (name == "rpg") return Algorithm::kRpg;
  if (name == "storm") return Algorithm::kStorm;
  throw std::invalid_argument("unknown algorithm '" + std::string(name) + "'");
}

EvalPolicy parse_eval_policy(std::string_view name) {
  if (name == "sample") return EvalPolicy::kSample;
  if (name == "mean") return EvalPolicy::kMean;
  throw std::invalid_argument("unknown evaluation policy '" + std::string(name) + "'");
}

const char* to_string(EvalPolicy policy) { return policy == EvalPolicy::kSample ? "sample" : "mean"; }

const char* to_string(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::kSrma: return "srma";
    case Algorithm::kSma: return "sma";
    case Algorithm::kRpg: return "rpg";
    case Algorithm::kStorm: return "storm";
  }
  return "unknown";
}

void AlgoConfig::validate() const {
  if (!(eta >= 0.0) || !std::isfinite(eta)) throw std::invalid_argument("eta must be finite and >= 0");
  if (geometry.kind == GeometryKind::kPolicyKL && !(eta > 0.0))
    throw std::invalid_argument("the policy-KL prox needs eta > 0");
  if (uses_tracking(algorithm) && !(beta > 0.0 && beta <= 1.0))
    throw std::invalid_argument("beta must lie in (0, 1]");
  if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("gamma must lie in (0, 1)");
  if (iterations < 0) throw std::invalid_argument("iterations must be nonnegative");
  if (batch_size < 1) throw std::invalid_argument("batch_size must be at least 1");
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw std::invalid_argument("sigma must be positive");
  if (!(w_max > 0.0)) throw std::invalid_argument("w_max must be positive");
  if (eval_every < 0) throw std::invalid_argument("eval_every must be nonnegative");
  if (eval_every > 0 && eval_rollouts < 1) throw std::invalid_argument("eval_rollouts must be >= 1");
  if (algorithm == Algorithm::kStorm && geometry.kind != GeometryKind::kEuclidean)
    throw std::invalid_argument("STORM requires the Euclidean geometry");
  if (algorithm == Algorithm::kRpg && geometry.kind != GeometryKind::kEuclidean)
    throw std::invalid_argument("RPG requires the Euclidean geometry");
}

RunResult srma_run(const AlgoConfig& cfg, const Environment& env, const FeatureMap<double>& features) {
  if (cfg.algorithm == Algorithm::kStorm && cfg.geometry.kind != GeometryKind::kEuclidean)
    throw std::invalid_argument("STORM requires the Euclidean geometry");
  return run_loop(cfg, env, features, Update::kTracked);
}

RunResult sma_run(const AlgoConfig& cfg, const Environment& env, const FeatureMap<double>& features) {
  return run_loop(cfg, env, features, Update::kFresh);
}

RunResult rpg_run(const AlgoConfig& cfg, const Environment& env, const FeatureMap<double>& features) {
  return run_loop(cfg, env, features, Update::kPlain);
}

RunResult srma_run(const AlgoConfig& cfg, const Environment& env) {
  return srma_run(cfg, env, default_features(env));
}
RunResult sma_run(const AlgoConfig& cfg, const Environment& env) {
  return sma_run(cfg, env, default_features(env));
}
RunResult rpg_run(const AlgoConfig& cfg, const Environment& env) {
  return rpg_run(cfg, env, default_features(env));
}

RunResult run_algorithm(const AlgoConfig& cfg, const Environment& env,
                        const FeatureMap<double>& features) {
  switch (cfg.algorithm) {
    case Algorithm::kSrma:
    case Algorithm::kStorm: return srma_run(cfg, env, features);
    case Algorithm::kSma: return sma_run(cfg, env, features);
    case Algorithm::kRpg: return rpg_run(cfg, env, features);
  }
  throw std::invalid_argument("unknown algorithm");
}

StepSizes step_size_rule(const StepSizeInputs& in) {
  if (!(in.zeta > 0.0) || !(in.L_prime > 0.0) || !(in.m3_tilde > 0.0) || !(in.C1 > 0.0))
    throw std::invalid_argument("step size inputs must be positive");
  if (!(in.C1 > 2.0 / in.zeta)) throw std::invalid_argument("C1 must exceed 2 / zeta");
  const double first =
      in.mode == StepSizeMode::kLiteral ? in.zeta * in.L_prime / 10.0 : in.zeta / (10.0 * in.L_prime);
  const double second = in.zeta / (8.0 * in.m3_tilde * in.C1 * in.C1);
  StepSizes out;
  out.eta = std::min(first, second);
  out.beta = std::min(in.C1 * out.eta, 1.0);
  return out;
}

double SyntheticTrace::min_breg_grad_sq() const {
  if (breg_grad_sq.empty()) return std::numeric_limits<double>::quiet_NaN();
  return *std::min_element(breg_grad_sq.begin(), breg_grad_sq.end());
}

SyntheticTrace synthetic_run(const SyntheticObjective& obj, const SyntheticRunConfig& cfg) {
  if (!(cfg.eta >= 0.0)) throw std::invalid_argument("eta must be nonnegative");
  const bool tracked = uses_tracking(cfg.algorithm);
  if (tracked && !(cfg.beta > 0.0 && cfg.beta <= 1.0))
    throw std::invalid_argument("beta must lie in (0, 1]");
  if (cfg.iterations < 0) throw std::invalid_argument("iterations must be nonnegative");

  Rng rng(cfg.seed);
  SyntheticTrace trace;
  trace.breg_grad_sq.reserve(static_cast<std::size_t>(cfg.iterations));
  Vec theta = obj.start;
  Vec theta_prev = theta;
  Vec g_hat = Vec::Zero(obj.d);
  for (long k = 1; k <= cfg.iterations; ++k) {
    const Vec xi = obj.noise(rng);
    const Vec g_new = obj.ascent_gradient(theta) + xi;
    if (!tracked || (k == 1 && cfg.warm_start_tracker)) {
      g_hat = g_new;
    } else {
      const Vec g_old = obj.ascent_gradient(theta_prev) + xi;
      g_hat = (1.0 - cfg.beta) * (g_hat - g_old) + g_new;
    }
    trace.breg_grad_sq.push_back(g_hat.squaredNorm());
    theta_prev = theta;
    theta += cfg.eta * g_hat;
  }
  trace.theta = theta;
  return trace;
}

}  // namespace srma
