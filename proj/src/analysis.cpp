#include "srma/analysis.hpp"

#include "srma/parallel.hpp"
#include "srma/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace srma {

double exploration_tolerance(const PolicyModel<double>& p, double s, double c, double tol) {
  if (!(c > 0.0) || !std::isfinite(c)) throw std::invalid_argument("half width must be positive");
  if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
  const double phi_norm = p.features()(s).norm();
  const double sigma = p.sigma();
  const PolicyFamily family = p.family();
  if (phi_norm == 0.0) return 0.0;

  // Integrand in the residual z = a - mean; both families are symmetric but
  // each tail is integrated on its own.
  const auto integrand = [&](double z) {
    return std::abs(score_weight(family, sigma, z)) * phi_norm *
           std::exp(log_density_residual(family, sigma, z));
  };
  // Beyond the cutoff each tail holds less than tol / 10: the Gaussian tail
  // is ||phi|| phi_N(X / sigma) / sigma, the Cauchy one at most
  // ||phi|| sigma / (pi X^2).
  double cutoff = 0.0;
  if (family == PolicyFamily::kGaussian) {
    cutoff = 40.0 * sigma;
  } else {
    cutoff = std::sqrt(10.0 * phi_norm * sigma / (std::numbers::pi * tol));
  }
  if (c >= cutoff) return 0.0;
  const double half = 0.5 * tol;
  const double right = integrate_doubling_panels(integrand, 0.0, c, cutoff, half);
  const double left =
      integrate_doubling_panels([&](double x) { return integrand(-x); }, 0.0, c, cutoff, half);
  return left + right;
}

std::optional<double> exploration_tolerance_cap(const PolicyModel<double>& p, double s, double c) {
  if (!(c > 0.0)) throw std::invalid_argument("half width must be positive");
  if (p.family() == PolicyFamily::kGaussian) return std::nullopt;
  const double tail = 2.0 / std::numbers::pi * std::atan(p.sigma() / c);
  return p.features()(s).norm() / p.sigma() * tail;
}

SmoothnessConstants smoothness_constants(double D, double sigma, double U_R, double gamma,
                                         double C_w) {
  if (!(D > 0.0) || !(sigma > 0.0) || !(U_R > 0.0))
    throw std::invalid_argument("D, sigma and U_R must be positive");
  if (!(C_w >= 0.0)) throw std::invalid_argument("C_w must be nonnegative");
  if (!(gamma >= 0.0 && gamma < 1.0)) throw std::invalid_argument("gamma must lie in [0, 1)");

  SmoothnessConstants k;
  const double root_gamma = std::sqrt(gamma);
  const double one_minus = 1.0 - gamma;
  const double horizon = (1.0 + root_gamma) / (one_minus * (1.0 - root_gamma) * (1.0 - root_gamma));
  k.C_w = C_w;
  k.B = D / sigma;
  k.L_pi = 2.0 * D * D / (sigma * sigma) + 7.0 * D / (sigma * sigma) + 1.0;
  k.L = U_R * k.L_pi / (one_minus * one_minus) +
        (1.0 + gamma) * U_R * k.B * k.B / (one_minus * one_minus * one_minus);
  k.m2 = 2.0 * U_R * k.B * horizon;
  k.m0 = 0.5 * k.m2;
  k.m1 = 0.0;
  k.m3 = 2.0;
  k.m3_tilde = 2.0 * (2.0 + k.m3);
  k.E_T = 1.0 / (1.0 - root_gamma);
  k.E_T2 = (1.0 + root_gamma) / ((1.0 - root_gamma) * (1.0 - root_gamma));
  k.L1 = 2.0 * k.L * k.L + 2.0 * C_w * U_R * U_R * k.B * k.B * horizon;
  return k;
}

Vec finite_diff_grad(const std::function<double(const Vec&)>& f, const Vec& theta, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("finite difference step must be positive");
  Vec grad(theta.size());
  Vec probe = theta;
  for (Eigen::Index i = 0; i < theta.size(); ++i) {
    probe[i] = theta[i] + h;
    const double up = f(probe);
    probe[i] = theta[i] - h;
    const double down = f(probe);
    probe[i] = theta[i];
    grad[i] = (up - down) / (2.0 * h);
  }
  return grad;
}

double SyntheticObjective::value(const Vec& theta) const {
  return 0.5 * theta.dot(A * theta) + theta.array().cos().sum();
}

Vec SyntheticObjective::gradient(const Vec& theta) const {
  return A * theta - theta.array().sin().matrix();
}

Vec SyntheticObjective::noise(Rng& rng) const {
  Vec xi(d);
  const double scale = std::sqrt(m0);
  for (Eigen::Index i = 0; i < d; ++i) xi[i] = scale * standard_normal(rng);
  return xi;
}

SyntheticObjective make_synthetic(Eigen::Index d, double L, double m0, std::uint64_t seed) {
  if (d < 1) throw std::invalid_argument("dimension must be at least 1");
  if (!(L >= 1.0)) throw std::invalid_argument("smoothness L must be at least 1");
  if (!(m0 >= 0.0)) throw std::invalid_argument("noise level must be nonnegative");
  Rng rng(derive_seed(seed, 0x5f17));

  Mat gauss(d, d);
  for (Eigen::Index j = 0; j < d; ++j)
    for (Eigen::Index i = 0; i < d; ++i) gauss(i, j) = standard_normal(rng);
  const Mat q = Eigen::HouseholderQR<Mat>(gauss).householderQ();
  Vec spectrum(d);
  spectrum[0] = 1.0;
  for (Eigen::Index i = 1; i < d; ++i) spectrum[i] = uniform_open(rng);

  SyntheticObjective obj;
  obj.d = d;
  obj.L = L;
  obj.m0 = m0;
  obj.A = (L - 1.0) * q * spectrum.asDiagonal() * q.transpose();
  obj.A = 0.5 * (obj.A + obj.A.transpose());
  obj.start.resize(d);
  for (Eigen::Index i = 0; i < d; ++i) obj.start[i] = standard_normal(rng);
  return obj;
}

std::vector<double> tracking_error_probe(const SyntheticObjective& obj, double beta, double eta,
                                         long K, std::uint64_t seed, int replicates) {
  if (!(beta > 0.0 && beta <= 1.0)) throw std::invalid_argument("beta must lie in (0, 1]");
  if (!(eta >= 0.0)) throw std::invalid_argument("eta must be nonnegative");
  if (K < 0 || replicates < 1) throw std::invalid_argument("K >= 0 and replicates >= 1 required");

  const auto n = static_cast<std::size_t>(K);
  std::vector<std::vector<double>> per_replicate(static_cast<std::size_t>(replicates));
  parallel_for(per_replicate.size(), [&](std::size_t r) {
    Rng rng(derive_seed(seed, r));
    std::vector<double>& err = per_replicate[r];
    err.resize(n);
    Vec theta = obj.start;
    Vec theta_prev = theta;
    Vec g_hat = Vec::Zero(obj.d);
    for (std::size_t k = 0; k < n; ++k) {
      const Vec xi = obj.noise(rng);
      const Vec exact = obj.ascent_gradient(theta);
      const Vec g_new = exact + xi;
      const Vec g_old = obj.ascent_gradient(theta_prev) + xi;
      g_hat = (1.0 - beta) * (g_hat - g_old) + g_new;
      err[k] = (g_hat - exact).squaredNorm();
      theta_prev = theta;
      theta += eta * g_hat;
    }
  });

  std::vector<double> mean(n, 0.0);
  for (const auto& err : per_replicate)
    for (std::size_t k = 0; k < n; ++k) mean[k] += err[k];
  for (double& m : mean) m /= static_cast<double>(replicates);
  return mean;
}

}  // namespace srma
