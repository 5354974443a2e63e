#pragma once

#include "srma/algorithms.hpp"
#include "srma/config.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace srma {

/// One [section] of an experiment file: an algorithm run repeated over seeds.
struct AlgorithmSpec {
  std::string id;
  Algorithm algorithm = Algorithm::kSrma;
  PolicyFamily family = PolicyFamily::kGaussian;
  GeometryKind geometry = GeometryKind::kEuclidean;
  std::optional<double> beta;
  std::optional<double> c1;
  std::optional<double> sigma;
  std::optional<double> eta;
  std::optional<double> w_max;
};

struct ExperimentConfig {
  std::string env = "pmc";
  double gamma = 0.97;
  double eta = 0.005;
  long iterations = 500;
  int seeds = 15;
  std::uint64_t master_seed = 0;
  int eval_every = 25;
  int eval_rollouts = 20;
  EvalPolicy eval_policy = EvalPolicy::kSample;
  std::filesystem::path output_dir = "results";
  double sigma = 1.0;
  double w_max = kDefaultWeightClip;
  int batch_size = 1;
  double kl_anchor = 1e-3;
  /// Radial-basis features spread over the environment's state range.
  int feature_count = 8;
  double feature_bandwidth = 1.0;
  double feature_cap = 1.0;
  bool timing = false;
  /// 0 means one worker per hardware thread.
  unsigned workers = 0;
  std::vector<AlgorithmSpec> algorithms;

  /// Throws std::invalid_argument on inconsistent values.
  void validate() const;
};

FeatureMap<double> make_features(const ExperimentConfig& cfg, const Environment& env);

/// Tracking step used when a section gives neither beta nor c1.
inline constexpr double kDefaultBeta = 0.5;

/// Top-level keys and one section per algorithm; see README for the schema.
ExperimentConfig parse_experiment(const IniDocument& doc);
ExperimentConfig load_experiment(const std::filesystem::path& path);

/// The run configuration for `spec` and user-facing seed index `seed`.
/// The RNG stream seed is derived from (master_seed, spec.id, seed).
AlgoConfig make_algo_config(const ExperimentConfig& cfg, const AlgorithmSpec& spec, int seed);

struct SeedRun {
  std::string algorithm;
  int seed = 0;
  RunResult result;
};

struct ExperimentResult {
  /// Ordered by algorithm (config order), then seed.
  std::vector<SeedRun> runs;
  long iterations = 0;
  std::vector<std::string> algorithm_ids;
};

/// Runs every (algorithm, seed) pair on a worker pool. Output order and
/// content do not depend on the number of workers.
ExperimentResult execute_experiment(const ExperimentConfig& cfg);

void write_raw_csv(std::ostream& out, const ExperimentResult& result);
void write_aggregate_csv(std::ostream& out, const ExperimentResult& result);

/// Per algorithm: final evaluation mean and cross-seed std, the fraction of
/// seeds whose trajectories ever terminated, and the diverged count.
void write_summary_csv(std::ostream& out, const ExperimentResult& result);

struct AlgorithmSummary {
  std::string algorithm;
  int seeds = 0;
  int diverged = 0;
  /// Mean and sample std over seeds of the last evaluation return; nullopt
  /// when undefined.
  std::optional<double> final_eval_mean;
  std::optional<double> final_eval_std;
  double reached_terminal_fraction = 0;
};

std::vector<AlgorithmSummary> summarize(const ExperimentResult& result);

/// execute_experiment plus raw.csv, aggregate.csv and summary.csv under
/// cfg.output_dir. Throws std::runtime_error on I/O failure.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

/// Settings for the tracking-error probe command.
struct ProbeConfig {
  long dimension = 10;
  double smoothness = 5.0;
  double noise = 1.0;
  std::vector<double> betas{0.1, 0.5, 1.0};
  double eta = 0.0;
  long iterations = 50;
  std::uint64_t seed = 0;
  int replicates = 200;
  std::optional<std::filesystem::path> output;
};

ProbeConfig load_probe_config(const std::filesystem::path& path);
ProbeConfig parse_probe_config(const IniDocument& doc);

/// CSV with columns beta, k, epsilon.
void write_probe_csv(std::ostream& out, const ProbeConfig& cfg);

/// Fast invariant checks; prints one line per check. Returns the number of
/// failed checks.
int run_selftest(std::ostream& out);

}  // namespace srma
