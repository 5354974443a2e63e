#include "srma/mirror.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace srma {
namespace {

void require_batch(const BregmanGeometry& geom) {
  if (geom.kind == GeometryKind::kPolicyKL && geom.state_batch.empty())
    throw std::invalid_argument("policy-KL geometry needs a nonempty state batch");
}

Mat features_of(const FeatureMap<double>& features, const std::vector<double>& states) {
  Mat rows(static_cast<Eigen::Index>(states.size()), features.dim());
  for (std::size_t i = 0; i < states.size(); ++i)
    rows.row(static_cast<Eigen::Index>(i)) = features(states[i]).transpose();
  return rows;
}

Vec second_moment_eigenvalues(const Mat& rows) {
  const Mat m = rows.transpose() * rows / static_cast<double>(rows.rows());
  return Eigen::SelfAdjointEigenSolver<Mat>(m, Eigen::EigenvaluesOnly).eigenvalues();
}

}  // namespace

GeometryKind parse_geometry(std::string_view name) {
  if (name == "euclidean") return GeometryKind::kEuclidean;
  if (name == "policy_kl") return GeometryKind::kPolicyKL;
  throw std::invalid_argument("unknown geometry '" + std::string(name) + "'");
}

const char* to_string(GeometryKind kind) {
  return kind == GeometryKind::kEuclidean ? "euclidean" : "policy_kl";
}

BregmanGeometry BregmanGeometry::policy_kl(const PolicyModel<double>& model,
                                           std::vector<double> states, double anchor) {
  if (!(anchor >= 0.0)) throw std::invalid_argument("anchor must be nonnegative");
  BregmanGeometry geom;
  geom.kind = GeometryKind::kPolicyKL;
  geom.family = model.family();
  geom.sigma = model.sigma();
  geom.anchor = anchor;
  return geom.with_states(model.features(), std::move(states));
}

BregmanGeometry BregmanGeometry::with_states(const FeatureMap<double>& features,
                                             std::vector<double> states) const {
  if (states.empty()) throw std::invalid_argument("policy-KL geometry needs a nonempty state batch");
  BregmanGeometry geom = *this;
  geom.batch_features = features_of(features, states);
  geom.state_batch = std::move(states);
  geom.quadratic_weight = geom.anchor;
  if (geom.family == PolicyFamily::kCauchy) {
    const double lambda_max = second_moment_eigenvalues(geom.batch_features).maxCoeff();
    geom.quadratic_weight += std::max(0.0, lambda_max) / (16.0 * geom.sigma * geom.sigma);
  }
  geom.zeta = certify_zeta(geom);
  return geom;
}

double bregman_div(const BregmanGeometry& geom, const Vec& x, const Vec& y) {
  if (x.size() != y.size()) throw std::invalid_argument("bregman_div: dimension mismatch");
  const Vec diff = x - y;
  if (geom.kind == GeometryKind::kEuclidean) return 0.5 * diff.squaredNorm();
  require_batch(geom);
  const Vec delta = geom.batch_features * diff;
  double kl = 0.0;
  for (Eigen::Index i = 0; i < delta.size(); ++i) kl += kl_mean_shift(geom.family, geom.sigma, delta[i]);
  return kl / static_cast<double>(delta.size()) + 0.5 * geom.quadratic_weight * diff.squaredNorm();
}

Vec bregman_div_gradient(const BregmanGeometry& geom, const Vec& x, const Vec& y) {
  const Vec diff = x - y;
  if (geom.kind == GeometryKind::kEuclidean) return diff;
  require_batch(geom);
  const Vec delta = geom.batch_features * diff;
  const Vec d1 = delta.unaryExpr([&](double d) { return kl_mean_shift_d1(geom.family, geom.sigma, d); });
  return geom.batch_features.transpose() * d1 / static_cast<double>(delta.size()) + geom.quadratic_weight * diff;
}

Mat bregman_div_hessian(const BregmanGeometry& geom, const Vec& x, const Vec& y) {
  const auto dim = x.size();
  if (geom.kind == GeometryKind::kEuclidean) return Mat::Identity(dim, dim);
  require_batch(geom);
  const Vec delta = geom.batch_features * (x - y);
  const Vec d2 = delta.unaryExpr([&](double d) { return kl_mean_shift_d2(geom.family, geom.sigma, d); });
  Mat h = geom.batch_features.transpose() * d2.asDiagonal() * geom.batch_features;
  h /= static_cast<double>(delta.size());
  h.diagonal().array() += geom.quadratic_weight;
  return h;
}

double certify_zeta(const BregmanGeometry& geom) {
  if (geom.kind == GeometryKind::kEuclidean) return 1.0;
  require_batch(geom);
  // Hessian of D(., y) is mean_s c(delta_s) phi_s phi_s^T + q I. Gaussian:
  // c = 1 / sigma^2. Cauchy: c >= -1 / (16 sigma^2), and q cancels that
  // lower bound down to the anchor.
  if (geom.family == PolicyFamily::kGaussian) {
    const double lambda_min = std::max(0.0, second_moment_eigenvalues(geom.batch_features).minCoeff());
    return geom.quadratic_weight + lambda_min / (geom.sigma * geom.sigma);
  }
  const double lambda_max = std::max(0.0, second_moment_eigenvalues(geom.batch_features).maxCoeff());
  return std::max(0.0, geom.quadratic_weight - lambda_max / (16.0 * geom.sigma * geom.sigma));
}

Vec prox_step(const BregmanGeometry& geom, const Vec& g, const Vec& theta, double eta) {
  if (!(eta > 0.0)) throw std::invalid_argument("prox_step: eta must be positive");
  if (g.size() != theta.size()) throw std::invalid_argument("prox_step: dimension mismatch");
  if (!g.allFinite()) throw std::invalid_argument("prox_step: gradient is not finite");
  if (geom.kind == GeometryKind::kEuclidean) return theta + eta * g;
  require_batch(geom);

  const auto objective = [&](const Vec& x) { return g.dot(x) - bregman_div(geom, x, theta) / eta; };
  Vec x = theta + eta * g;
  double fx = objective(x);
  int decreases = 0;
  bool converged = false;
  for (int step = 0; step < geom.inner_steps; ++step) {
    const Vec grad = g - bregman_div_gradient(geom, x, theta) / eta;
    if (grad.norm() < geom.inner_tol) {
      if (converged) break;
      converged = true;  // one more Newton step to polish
    }
    const Mat h = bregman_div_hessian(geom, x, theta);
    Vec dir;
    Eigen::LLT<Mat> llt(h);
    if (llt.info() == Eigen::Success) {
      dir = llt.solve(eta * grad);
    } else {
      // Outside the locally convex region: Newton on the curvature clipped
      // from below.
      Eigen::SelfAdjointEigenSolver<Mat> es(h);
      const Vec lam = es.eigenvalues().cwiseMax(std::max(geom.quadratic_weight, 1e-12));
      dir = es.eigenvectors() * (es.eigenvectors().transpose() * (eta * grad)).cwiseQuotient(lam);
    }

    const double slack = 1e-15 * (1.0 + std::abs(fx));
    bool improved = false;
    double t = 1.0;
    for (int ls = 0; ls < 40 && !improved; ++ls, t *= 0.5) {
      const Vec cand = x + t * dir;
      const double fc = objective(cand);
      if (fc >= fx - slack) {
        x = cand;
        fx = fc;
        improved = true;
      }
    }
    if (improved) {
      decreases = 0;
      continue;
    }
    const Vec cand = x + geom.inner_step_size_factor * eta * grad;
    const double fc = objective(cand);
    if (fc < fx - geom.inner_tol * (1.0 + std::abs(fx))) {
      if (++decreases >= 2)
        throw InnerSolverDiverged("prox objective decreased on two consecutive inner steps");
    } else {
      decreases = 0;
    }
    x = cand;
    fx = fc;
  }
  return x;
}

Vec bregman_gradient(const BregmanGeometry& geom, const Vec& g, const Vec& theta, double eta) {
  if (geom.kind == GeometryKind::kEuclidean) {
    if (!(eta > 0.0)) throw std::invalid_argument("bregman_gradient: eta must be positive");
    return g;
  }
  return (prox_step(geom, g, theta, eta) - theta) / eta;
}

}  // namespace srma
