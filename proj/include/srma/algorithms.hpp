#pragma once

#include "srma/analysis.hpp"
#include "srma/envs.hpp"
#include "srma/gradients.hpp"
#include "srma/mirror.hpp"
#include "srma/policies.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace srma {

enum class Algorithm { kSrma, kSma, kRpg, kStorm };

/// Evaluation rollouts either sample from the policy or act with its mean.
enum class EvalPolicy { kSample, kMean };

EvalPolicy parse_eval_policy(std::string_view name);
const char* to_string(EvalPolicy policy);

Algorithm parse_algorithm(std::string_view name);
const char* to_string(Algorithm algorithm);

struct AlgoConfig {
  Algorithm algorithm = Algorithm::kSrma;
  double eta = 0.005;
  /// Tracking step; ignored by SMA and RPG.
  double beta = 1.0;
  double gamma = 0.97;
  long iterations = 500;
  /// Independent trajectories averaged per iteration.
  int batch_size = 1;
  /// Kind and solver settings; the state batch is filled per iteration.
  BregmanGeometry geometry = BregmanGeometry::euclidean();
  PolicyFamily family = PolicyFamily::kGaussian;
  double sigma = 1.0;
  std::uint64_t seed = 0;
  double w_max = kDefaultWeightClip;
  ScoredAction scored = ScoredAction::kRaw;
  /// Seed the tracker with g_hat_1 = g_new instead of running the recursion
  /// from g_hat_0 = 0 (which would give beta * g_new).
  bool warm_start_tracker = true;
  /// Evaluate every `eval_every` iterations (0 disables) with
  /// `eval_rollouts` rollouts on an RNG stream separate from training.
  int eval_every = 0;
  int eval_rollouts = 20;
  EvalPolicy eval_policy = EvalPolicy::kSample;
  /// Record wall-clock time per iteration; off keeps output deterministic.
  bool timing = false;
  /// Initial parameters; zero when absent.
  std::optional<Vec> theta0;

  /// Throws std::invalid_argument on an inconsistent configuration.
  void validate() const;
};

/// Iterates whose norm exceeds this are treated as divergence.
inline constexpr double kDivergenceNorm = 1e6;

struct RunRecord {
  long k = 0;
  std::uint64_t seed = 0;
  std::string algorithm;
  /// Discounted return of the fresh trajectory (mean over the batch).
  double ret = 0;
  std::optional<double> eval_return;
  double breg_grad_norm = 0;
  double ghat_norm = 0;
  /// Norm of theta_{k+1}, the iterate after this step.
  double theta_norm = 0;
  double wall_ms = 0;
  bool diverged = false;
  /// Some training or evaluation trajectory of this iteration terminated.
  bool reached_terminal = false;
  /// End state of the first training trajectory.
  double final_state = 0;
};

struct RunResult {
  std::vector<RunRecord> records;
  bool diverged = false;
  std::string divergence_reason;
  Vec theta;
};

/// SRMA: tracked gradient with importance-weighted correction and
/// prox step. Runs regardless of cfg.algorithm; STORM is this loop with a
/// Euclidean geometry. Divergence (||theta|| > 1e6, non-finite values, or a
/// failing inner solver) stops the run and tags the last record.
RunResult srma_run(const AlgoConfig& cfg, const Environment& env, const FeatureMap<double>& features);
RunResult srma_run(const AlgoConfig& cfg, const Environment& env);

/// Mirror ascent on the fresh estimate, no tracking.
RunResult sma_run(const AlgoConfig& cfg, const Environment& env, const FeatureMap<double>& features);
RunResult sma_run(const AlgoConfig& cfg, const Environment& env);

/// theta_{k+1} = theta_k + eta g_new. Requires a Euclidean geometry.
RunResult rpg_run(const AlgoConfig& cfg, const Environment& env, const FeatureMap<double>& features);
RunResult rpg_run(const AlgoConfig& cfg, const Environment& env);

/// Dispatches on cfg.algorithm.
RunResult run_algorithm(const AlgoConfig& cfg, const Environment& env,
                        const FeatureMap<double>& features);

enum class StepSizeMode { kLiteral, kCorrected };

struct StepSizeInputs {
  double zeta = 1;
  double L_prime = 1;
  double m3_tilde = 8;
  double C1 = 1;
  StepSizeMode mode = StepSizeMode::kCorrected;
};

struct StepSizes {
  double eta = 0;
  double beta = 0;
};

/// Literal:   eta = min(zeta L' / 10, zeta / (8 m3~ C1^2)).
/// Corrected: eta = min(zeta / (10 L'), zeta / (8 m3~ C1^2)).
/// beta = min(C1 eta, 1). Requires positive inputs and C1 > 2 / zeta.
StepSizes step_size_rule(const StepSizeInputs& in);

struct SyntheticRunConfig {
  Algorithm algorithm = Algorithm::kSrma;
  double eta = 0.01;
  double beta = 1.0;
  long iterations = 1000;
  std::uint64_t seed = 0;
  bool warm_start_tracker = true;
};

struct SyntheticTrace {
  /// ||G_k||^2 for k = 1..K.
  std::vector<double> breg_grad_sq;
  Vec theta;
  double min_breg_grad_sq() const;
};

/// The same loops with Euclidean geometry on a synthetic objective, ascending
/// J = -F from obj.start. Both gradient evaluations of one iteration share
/// the noise draw.
SyntheticTrace synthetic_run(const SyntheticObjective& obj, const SyntheticRunConfig& cfg);

}  // namespace srma
