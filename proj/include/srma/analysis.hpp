#pragma once

#include "srma/policies.hpp"
#include "srma/types.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

namespace srma {

/// Two-sided tail integral of ||score|| * density over |a - mean(s)| > c at
/// (s, theta). Adaptive Simpson over doubling panels, absolute tolerance
/// `tol`. Throws std::invalid_argument for c <= 0 and QuadratureNotConverged
/// if a panel needs more than 60 bisections.
double exploration_tolerance(const PolicyModel<double>& p, double s, double c, double tol = 1e-10);

/// Analytic dominating value (||phi(s)|| / sigma) * P(|a - mean| > c) for the
/// Cauchy family, from the bounded score. std::nullopt for Gaussian.
std::optional<double> exploration_tolerance_cap(const PolicyModel<double>& p, double s, double c);

struct SmoothnessConstants {
  double B = 0;
  double L_pi = 0;
  double L = 0;
  double m0 = 0;
  double m1 = 0;
  double m2 = 0;
  double m3 = 0;
  double m3_tilde = 0;
  double E_T = 0;
  double E_T2 = 0;
  double L1 = 0;
  double C_w = 0;
};

/// Constants of the bounded-score analysis. D, sigma, U_R > 0, C_w >= 0,
/// gamma in [0, 1). m0 is the second-moment bound of the stochastic gradient,
/// which dominates its variance.
SmoothnessConstants smoothness_constants(double D, double sigma, double U_R, double gamma,
                                         double C_w = 1.0);

/// Central differences, one coordinate at a time.
Vec finite_diff_grad(const std::function<double(const Vec&)>& f, const Vec& theta, double h);

/// F(theta) = 1/2 theta^T A theta + sum_i cos(theta_i), A symmetric PSD with
/// ||A|| = L - 1. Optimizers maximize J = -F, which is bounded above and
/// L-smooth. The stochastic ascent oracle is -grad F(theta) + xi with
/// xi ~ N(0, m0 I), so E||xi||^2 = m0 d.
struct SyntheticObjective {
  Eigen::Index d = 0;
  double L = 1;
  double m0 = 0;
  Mat A;
  /// Seeded starting point with entries drawn from N(0, 1).
  Vec start;

  double value(const Vec& theta) const;
  Vec gradient(const Vec& theta) const;
  /// Exact gradient of J = -F.
  Vec ascent_gradient(const Vec& theta) const { return -gradient(theta); }
  Vec noise(Rng& rng) const;
};

/// Throws std::invalid_argument unless d >= 1, L >= 1 and m0 >= 0.
SyntheticObjective make_synthetic(Eigen::Index d, double L, double m0, std::uint64_t seed);

/// Mean over `replicates` independent runs of ||g_hat_k - grad J(theta_k)||^2
/// for k = 1..K under the tracked recursion with Euclidean steps
/// theta_{k+1} = theta_k + eta g_hat_k, starting from g_hat_0 = 0 and
/// theta_0 = obj.start. Entry k - 1 of the result belongs to iteration k.
std::vector<double> tracking_error_probe(const SyntheticObjective& obj, double beta, double eta,
                                         long K, std::uint64_t seed, int replicates = 200);

}  // namespace srma
