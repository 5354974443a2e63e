#pragma once

// Bregman geometries, the mirror-ascent prox step and the generalized
// (Bregman) gradient.
//
// Sign convention: G = (prox(theta) - theta) / eta, so that
// theta_next = theta + eta * G and G reduces to g in the Euclidean case.
// The other common convention (theta - prox) / eta flips the sign and is
// inconsistent with the ascent update written as theta + eta * G.

#include "srma/policies.hpp"
#include "srma/types.hpp"

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace srma {

enum class GeometryKind { kEuclidean, kPolicyKL };

GeometryKind parse_geometry(std::string_view name);
const char* to_string(GeometryKind kind);

/// Distance-generating geometry for the prox step.
///
/// Euclidean: D(x, y) = 1/2 ||x - y||^2, zeta = 1.
/// PolicyKL:  D(x, y) = mean_s KL(pi_x(.|s) || pi_y(.|s)) + q/2 ||x - y||^2
///            over `state_batch`, with q = `quadratic_weight`. For Gaussian
///            policies q = anchor. The Cauchy KL log(1 + delta^2 / (4 sigma^2))
///            has curvature down to -1 / (16 sigma^2), so q adds
///            lambda_max(M) / (16 sigma^2), M = mean_s phi_s phi_s^T, which
///            makes D(., y) globally strongly convex. `zeta` is the certified
///            global modulus.
struct BregmanGeometry {
  GeometryKind kind = GeometryKind::kEuclidean;
  double zeta = 1.0;
  int inner_steps = 50;
  double inner_step_size_factor = 0.1;
  double inner_tol = 1e-8;
  double anchor = 1e-3;
  double quadratic_weight = 1e-3;

  PolicyFamily family = PolicyFamily::kGaussian;
  double sigma = 1.0;
  std::vector<double> state_batch;
  /// Row i is phi(state_batch[i]).
  Mat batch_features;

  static BregmanGeometry euclidean() { return {}; }

  /// Builds the policy-KL geometry for `model`'s family, scale and features
  /// and certifies zeta. Throws std::invalid_argument on an empty batch.
  static BregmanGeometry policy_kl(const PolicyModel<double>& model, std::vector<double> states,
                                   double anchor = 1e-3);

  /// Same family, scale, features and settings with a new state batch.
  BregmanGeometry with_states(const FeatureMap<double>& features, std::vector<double> states) const;
};

double bregman_div(const BregmanGeometry& geom, const Vec& x, const Vec& y);

/// Gradient and Hessian of D(., y) at x.
Vec bregman_div_gradient(const BregmanGeometry& geom, const Vec& x, const Vec& y);
Mat bregman_div_hessian(const BregmanGeometry& geom, const Vec& x, const Vec& y);

/// Global strong-convexity modulus of D(., y): anchor + lambda_min(M) / sigma^2
/// for Gaussian, anchor for Cauchy. Euclidean returns 1 exactly.
double certify_zeta(const BregmanGeometry& geom);

/// argmax_theta' { <g, theta'> - (1/eta) D(theta', theta) }.
/// Euclidean is the closed form theta + eta g. PolicyKL runs a damped Newton
/// ascent from the warm start theta + eta g; it throws InnerSolverDiverged if
/// the prox objective decreases on two consecutive inner steps.
Vec prox_step(const BregmanGeometry& geom, const Vec& g, const Vec& theta, double eta);

/// (prox_step(g, theta, eta) - theta) / eta.
Vec bregman_gradient(const BregmanGeometry& geom, const Vec& g, const Vec& theta, double eta);

}  // namespace srma
