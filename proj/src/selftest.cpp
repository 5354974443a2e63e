#include "srma/harness.hpp"
#include "srma/sampling.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include <ostream>

namespace srma {
namespace {

struct Check {
  const char* name;
  std::function<std::string()> run;  // empty string on success
};

std::string score_bound_check() {
  Rng rng(1);
  const auto features = FeatureMap<double>::evenly_spaced(-4.0, 3.709);
  for (double sigma : {0.5, 1.0, 2.0}) {
    for (int i = 0; i < 20000; ++i) {
      Vec theta(features.dim());
      for (Eigen::Index j = 0; j < theta.size(); ++j) theta[j] = 5.0 * standard_normal(rng);
      const PolicyModel<double> p(PolicyFamily::kCauchy, theta, sigma, features);
      const double s = -6.0 + 12.0 * uniform_open(rng);
      const double a = p.mean(s) + 10.0 * sigma * std::tan(std::numbers::pi * (uniform_open(rng) - 0.5));
      if (score(p, s, a).norm() > 1.0 / sigma + 1e-12) return "score exceeds D / sigma";
    }
  }
  return {};
}

std::string euclidean_prox_check() {
  const BregmanGeometry geom = BregmanGeometry::euclidean();
  Rng rng(2);
  for (int i = 0; i < 1000; ++i) {
    Vec g(4), theta(4);
    for (int j = 0; j < 4; ++j) {
      g[j] = standard_normal(rng);
      theta[j] = standard_normal(rng);
    }
    const double eta = uniform_open(rng);
    if (prox_step(geom, g, theta, eta) != theta + eta * g) return "prox is not theta + eta g";
    if (bregman_gradient(geom, g, theta, eta) != g) return "Bregman gradient is not g";
  }
  return {};
}

std::string policy_kl_contract_check() {
  Rng rng(3);
  const auto features = FeatureMap<double>::evenly_spaced(-4.0, 3.709);
  for (PolicyFamily family : {PolicyFamily::kGaussian, PolicyFamily::kCauchy}) {
    for (int i = 0; i < 50; ++i) {
      const PolicyModel<double> p(family, Vec::Zero(features.dim()), 1.0, features);
      std::vector<double> states;
      for (int j = 0; j < 30; ++j) states.push_back(-4.0 + 7.709 * uniform_open(rng));
      const BregmanGeometry geom = BregmanGeometry::policy_kl(p, states);
      Vec g1(features.dim()), g2(features.dim()), theta(features.dim());
      for (Eigen::Index j = 0; j < g1.size(); ++j) {
        g1[j] = standard_normal(rng);
        g2[j] = standard_normal(rng);
        theta[j] = standard_normal(rng);
      }
      const double eta = 0.01 + 0.1 * uniform_open(rng);
      const Vec G1 = bregman_gradient(geom, g1, theta, eta);
      const Vec G2 = bregman_gradient(geom, g2, theta, eta);
      if (g1.dot(G1) < geom.zeta * G1.squaredNorm() - 1e-7) return "prop1 violated";
      if ((G1 - G2).norm() > (g1 - g2).norm() / geom.zeta + 1e-7) return "prop2 violated";
    }
  }
  return {};
}

std::string reduction_chain_check() {
  const PathologicalMountainCar env;
  AlgoConfig cfg;
  cfg.iterations = 30;
  cfg.beta = 1.0;
  cfg.seed = 7;
  cfg.algorithm = Algorithm::kSrma;
  const Vec a = srma_run(cfg, env).theta;
  cfg.algorithm = Algorithm::kSma;
  const Vec b = sma_run(cfg, env).theta;
  cfg.algorithm = Algorithm::kRpg;
  const Vec c = rpg_run(cfg, env).theta;
  if ((a - b).norm() > 1e-12 || (b - c).norm() > 1e-12) return "SRMA(beta=1), SMA and RPG disagree";
  return {};
}

std::string constants_check() {
  const SmoothnessConstants k = smoothness_constants(1.0, 1.0, 1.0, 0.0, 1.0);
  if (k.L_pi != 10.0 || k.L != 11.0) return "L_pi or L wrong at the unit inputs";
  return {};
}

std::string horizon_check() {
  Rng rng(4);
  double total = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) total += sample_horizon(0.97, rng);
  const double expected = 1.0 / (1.0 - std::sqrt(0.97));
  if (std::abs(total / n - expected) > 0.02 * expected) return "horizon mean off by more than 2%";
  return {};
}

std::string quadrature_check() {
  const auto features = FeatureMap<double>::radial_basis(Vec::Constant(1, 0.0), 1.0, 1.0);
  const PolicyModel<double> p(PolicyFamily::kGaussian, Vec::Zero(1), 1.0, features);
  const double closed = 2.0 * std::exp(-2.0) / std::sqrt(2.0 * std::numbers::pi);
  if (std::abs(exploration_tolerance(p, 0.0, 2.0) - closed) > 1e-8) return "Gaussian tail integral off";
  return {};
}

std::string is_identity_check() {
  const PathologicalMountainCar env;
  const FeatureMap<double> features = default_features(env);
  Rng rng(5);
  Vec theta(features.dim());
  for (Eigen::Index j = 0; j < theta.size(); ++j) theta[j] = standard_normal(rng);
  const PolicyModel<double> p(PolicyFamily::kCauchy, theta, 1.0, features);
  const Trajectory traj = rollout(env, p, 40, rng);
  if (pg_estimate_is(traj, p, theta, theta, 0.97) != pg_estimate(traj, p, 0.97))
    return "importance-weighted estimate differs at equal parameters";
  return {};
}

}  // namespace

int run_selftest(std::ostream& out) {
  const Check checks[] = {
      {"cauchy_score_bound", score_bound_check},
      {"euclidean_prox_exact", euclidean_prox_check},
      {"policy_kl_prop1_prop2", policy_kl_contract_check},
      {"reduction_chain", reduction_chain_check},
      {"constants_unit_inputs", constants_check},
      {"horizon_mean", horizon_check},
      {"gaussian_tail_quadrature", quadrature_check},
      {"is_equal_parameters", is_identity_check},
  };
  int failures = 0;
  for (const Check& check : checks) {
    std::string problem;
    try {
      problem = check.run();
    } catch (const std::exception& e) {
      problem = std::string("threw: ") + e.what();
    }
    if (problem.empty()) {
      out << "ok   " << check.name << '\n';
    } else {
      out << "FAIL " << check.name << ": " << problem << '\n';
      ++failures;
    }
  }
  return failures;
}

}  // namespace srma
