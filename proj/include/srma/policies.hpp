#pragma once

// Location-scale policies over a scalar action. The mean action at state s
// is phi(s)^T theta for both families; only the noise law differs.

#include "srma/types.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>

namespace srma {

enum class PolicyFamily { kGaussian, kCauchy };

inline const char* to_string(PolicyFamily family) {
  return family == PolicyFamily::kGaussian ? "gaussian" : "cauchy";
}

/// State feature map with a hard norm cap: ||phi(s)|| <= norm_cap for all s.
///
/// Radial-basis maps put Gaussian bumps at fixed centers. The linear map is
/// phi(s) = [s] and exists for oracle environments where the value function
/// has a closed form; its default cap is infinite.
template <typename Scalar>
class FeatureMap {
 public:
  enum class Kind { kRadialBasis, kLinear };

  static FeatureMap radial_basis(Vector<Scalar> centers, Scalar bandwidth, Scalar norm_cap) {
    if (centers.size() == 0) throw std::invalid_argument("feature map needs at least one center");
    if (!(bandwidth > 0) || !(norm_cap > 0))
      throw std::invalid_argument("bandwidth and norm cap must be positive");
    return FeatureMap(Kind::kRadialBasis, std::move(centers), bandwidth, norm_cap);
  }

  /// `count` centers evenly spaced over [lo, hi], endpoints included.
  static FeatureMap evenly_spaced(Scalar lo, Scalar hi, Eigen::Index count = 8,
                                  Scalar bandwidth = 1, Scalar norm_cap = 1) {
    Vector<Scalar> centers = Vector<Scalar>::Constant(1, (lo + hi) / 2);
    if (count != 1) centers = Vector<Scalar>::LinSpaced(count, lo, hi);
    return radial_basis(std::move(centers), bandwidth, norm_cap);
  }

  static FeatureMap linear(Scalar norm_cap = std::numeric_limits<Scalar>::infinity()) {
    return FeatureMap(Kind::kLinear, Vector<Scalar>(), Scalar(1), norm_cap);
  }

  Kind kind() const { return kind_; }
  Eigen::Index dim() const { return kind_ == Kind::kLinear ? 1 : centers_.size(); }
  Scalar norm_cap() const { return norm_cap_; }
  Scalar bandwidth() const { return bandwidth_; }
  const Vector<Scalar>& centers() const { return centers_; }

  Vector<Scalar> operator()(Scalar s) const {
    Vector<Scalar> phi;
    if (kind_ == Kind::kLinear) {
      phi = Vector<Scalar>::Constant(1, s);
    } else {
      const Scalar inv_two_bw2 = Scalar(1) / (2 * bandwidth_ * bandwidth_);
      phi = (-(centers_.array() - s).square() * inv_two_bw2).exp().matrix();
    }
    const Scalar raw = phi.norm();
    if (raw > norm_cap_) phi *= norm_cap_ / raw;
    return phi;
  }

 private:
  FeatureMap(Kind kind, Vector<Scalar> centers, Scalar bandwidth, Scalar norm_cap)
      : kind_(kind), centers_(std::move(centers)), bandwidth_(bandwidth), norm_cap_(norm_cap) {}

  Kind kind_;
  Vector<Scalar> centers_;
  Scalar bandwidth_;
  Scalar norm_cap_;
};

/// Immutable policy description. Copy with `with_theta` to evaluate at
/// other parameters.
template <typename Scalar>
class PolicyModel {
 public:
  PolicyModel(PolicyFamily family, Vector<Scalar> theta, Scalar sigma, FeatureMap<Scalar> features)
      : family_(family), theta_(std::move(theta)), sigma_(sigma), features_(std::move(features)) {
    if (!(sigma_ > 0) || !std::isfinite(sigma_)) throw std::invalid_argument("sigma must be positive");
    if (theta_.size() != features_.dim())
      throw std::invalid_argument("theta dimension does not match feature dimension");
    if (!theta_.allFinite()) throw std::invalid_argument("theta must be finite");
  }

  PolicyFamily family() const { return family_; }
  const Vector<Scalar>& theta() const { return theta_; }
  Scalar sigma() const { return sigma_; }
  const FeatureMap<Scalar>& features() const { return features_; }
  Eigen::Index dim() const { return theta_.size(); }

  Scalar mean(Scalar s) const { return features_(s).dot(theta_); }

  PolicyModel with_theta(Vector<Scalar> theta) const {
    return PolicyModel(family_, std::move(theta), sigma_, features_);
  }

 private:
  PolicyFamily family_;
  Vector<Scalar> theta_;
  Scalar sigma_;
  FeatureMap<Scalar> features_;
};

// Residual-level formulas. `r` is the action minus the mean.

template <typename Scalar>
Scalar log_density_residual(PolicyFamily family, Scalar sigma, Scalar r) {
  using std::log;
  const Scalar z = r / sigma;
  if (family == PolicyFamily::kGaussian)
    return Scalar(-0.5) * z * z - log(sigma) - Scalar(0.5) * log(2 * std::numbers::pi_v<Scalar>);
  return -log(sigma * std::numbers::pi_v<Scalar>) - std::log1p(z * z);
}

/// Scalar c such that grad_theta log pi(a|s) = c * phi(s).
/// Cauchy: 2z/(1+z^2) / sigma, which never exceeds 1/sigma in magnitude.
template <typename Scalar>
Scalar score_weight(PolicyFamily family, Scalar sigma, Scalar r) {
  if (family == PolicyFamily::kGaussian) return r / (sigma * sigma);
  return 2 * r / (sigma * sigma + r * r);
}

/// KL between two same-scale members of the family whose means differ by delta.
template <typename Scalar>
Scalar kl_mean_shift(PolicyFamily family, Scalar sigma, Scalar delta) {
  if (family == PolicyFamily::kGaussian) return delta * delta / (2 * sigma * sigma);
  return std::log1p(delta * delta / (4 * sigma * sigma));
}

/// First and second derivative of kl_mean_shift in delta.
template <typename Scalar>
Scalar kl_mean_shift_d1(PolicyFamily family, Scalar sigma, Scalar delta) {
  if (family == PolicyFamily::kGaussian) return delta / (sigma * sigma);
  return 2 * delta / (4 * sigma * sigma + delta * delta);
}

template <typename Scalar>
Scalar kl_mean_shift_d2(PolicyFamily family, Scalar sigma, Scalar delta) {
  if (family == PolicyFamily::kGaussian) return Scalar(1) / (sigma * sigma);
  const Scalar q = 4 * sigma * sigma + delta * delta;
  return 2 * (4 * sigma * sigma - delta * delta) / (q * q);
}

// Model-level operations.

template <typename Scalar>
Vector<Scalar> features(const FeatureMap<Scalar>& map, Scalar s) {
  return map(s);
}

template <typename Scalar>
Scalar log_density(const PolicyModel<Scalar>& p, Scalar s, Scalar a) {
  return log_density_residual(p.family(), p.sigma(), a - p.mean(s));
}

template <typename Scalar>
Vector<Scalar> score(const PolicyModel<Scalar>& p, Scalar s, Scalar a) {
  const Vector<Scalar> phi = p.features()(s);
  return score_weight(p.family(), p.sigma(), a - phi.dot(p.theta())) * phi;
}

/// Raw (unclipped) action. Cauchy draws use the inverse CDF, tan(pi(u - 1/2)).
template <typename Scalar>
Scalar sample_action(const PolicyModel<Scalar>& p, Scalar s, Rng& rng) {
  const Scalar mu = p.mean(s);
  if (p.family() == PolicyFamily::kGaussian)
    return mu + p.sigma() * static_cast<Scalar>(standard_normal(rng));
  const double u = uniform_open(rng);
  return mu + p.sigma() * static_cast<Scalar>(std::tan(std::numbers::pi * (u - 0.5)));
}

/// D / sigma for the Cauchy family; std::nullopt marks an unbounded score.
template <typename Scalar>
std::optional<Scalar> score_bound(const PolicyModel<Scalar>& p) {
  if (p.family() == PolicyFamily::kGaussian) return std::nullopt;
  const Scalar bound = p.features().norm_cap() / p.sigma();
  if (!std::isfinite(bound)) return std::nullopt;
  return bound;
}

/// Mean over `states` of KL(pi_theta1(.|s) || pi_theta2(.|s)) at the model's scale.
template <typename Scalar>
Scalar kl_same_scale(const PolicyModel<Scalar>& p, const Vector<Scalar>& theta1,
                     const Vector<Scalar>& theta2, std::span<const Scalar> states) {
  if (states.empty()) throw std::invalid_argument("kl_same_scale needs at least one state");
  const Vector<Scalar> diff = theta1 - theta2;
  Scalar total = 0;
  for (Scalar s : states) total += kl_mean_shift(p.family(), p.sigma(), p.features()(s).dot(diff));
  return total / static_cast<Scalar>(states.size());
}

}  // namespace srma
