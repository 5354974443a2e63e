#include "oracles.hpp"
#include "srma/policies.hpp"

#include <doctest.h>

#include <algorithm>
#include <vector>

using namespace srma;

namespace {

FeatureMap<double> single_center(double center = 0.0, double cap = 1.0) {
  return FeatureMap<double>::radial_basis(Vec::Constant(1, center), 1.0, cap);
}

double oracle_logpdf(PolicyFamily f, double a, double mu, double sigma) {
  return f == PolicyFamily::kGaussian ? oracle::gaussian_logpdf(a, mu, sigma)
                                      : oracle::cauchy_logpdf(a, mu, sigma);
}

Vec random_vec(oracle::Gen& gen, Eigen::Index d, double scale) {
  Vec v(d);
  for (Eigen::Index i = 0; i < d; ++i) v[i] = scale * gen.normal();
  return v;
}

}  // namespace

TEST_CASE("features: bump values and norm cap") {
  CHECK(single_center()(0.0)[0] == doctest::Approx(1.0).epsilon(1e-15));

  Vec centers(2);
  centers << -1.0, 1.0;
  const auto two = FeatureMap<double>::radial_basis(centers, 1.0, 10.0);
  const Vec phi = two(0.0);
  CHECK(phi[0] == doctest::Approx(std::exp(-0.5)).epsilon(1e-14));
  CHECK(phi[1] == doctest::Approx(0.6065306597).epsilon(1e-9));

  const auto eight = FeatureMap<double>::evenly_spaced(-4.0, 3.709, 8, 1.0, 1.0);
  CHECK(eight.dim() == 8);
  oracle::Gen gen(1);
  for (int i = 0; i < 10000; ++i) CHECK(eight(gen.uniform(-10, 10)).norm() <= 1.0 + 1e-12);
}

TEST_CASE("features: capped exactly when the raw norm exceeds the cap") {
  const auto map = FeatureMap<double>::evenly_spaced(-1.0, 1.0, 5, 2.0, 0.5);
  for (double s : {-1.0, 0.0, 0.3, 1.0}) CHECK(map(s).norm() == doctest::Approx(0.5).epsilon(1e-14));
  CHECK_THROWS_AS(FeatureMap<double>::radial_basis(Vec(), 1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(FeatureMap<double>::radial_basis(Vec::Zero(1), 0.0, 1.0), std::invalid_argument);
  CHECK(FeatureMap<double>::linear()(-3.0)[0] == -3.0);
}

TEST_CASE("policy model rejects invalid parameters") {
  CHECK_THROWS_AS(PolicyModel<double>(PolicyFamily::kCauchy, Vec::Zero(1), 0.0, single_center()),
                  std::invalid_argument);
  CHECK_THROWS_AS(PolicyModel<double>(PolicyFamily::kCauchy, Vec::Zero(2), 1.0, single_center()),
                  std::invalid_argument);
  Vec bad = Vec::Zero(1);
  bad[0] = std::nan("");
  CHECK_THROWS_AS(PolicyModel<double>(PolicyFamily::kGaussian, bad, 1.0, single_center()),
                  std::invalid_argument);
}

TEST_CASE("log_density: peak values") {
  const PolicyModel<double> c(PolicyFamily::kCauchy, Vec::Constant(1, 0.7), 1.0, single_center());
  const PolicyModel<double> g(PolicyFamily::kGaussian, Vec::Constant(1, 0.7), 1.0, single_center());
  const double mu = c.mean(0.0);
  CHECK(mu == doctest::Approx(0.7));
  CHECK(log_density(c, 0.0, mu) == doctest::Approx(-1.1447298858).epsilon(1e-10));
  CHECK(log_density(g, 0.0, mu) == doctest::Approx(-0.9189385332).epsilon(1e-10));

  const PolicyModel<double> c2(PolicyFamily::kCauchy, Vec::Zero(1), 2.0, single_center());
  CHECK(log_density(c2, 0.0, 2.0) == doctest::Approx(-std::log(4 * std::numbers::pi)).epsilon(1e-14));
}

TEST_CASE("log_density agrees with the textbook densities") {
  oracle::Gen gen(2);
  const auto map = FeatureMap<double>::evenly_spaced(-2.0, 2.0, 4);
  for (int i = 0; i < 500; ++i) {
    const auto fam = i % 2 ? PolicyFamily::kCauchy : PolicyFamily::kGaussian;
    const double sigma = gen.uniform(0.1, 3.0);
    const PolicyModel<double> p(fam, random_vec(gen, 4, 2.0), sigma, map);
    const double s = gen.uniform(-3, 3);
    const double a = gen.uniform(-10, 10);
    CHECK(log_density(p, s, a) == doctest::Approx(oracle_logpdf(fam, a, p.mean(s), sigma)).epsilon(1e-12));
  }
}

TEST_CASE("log_density integrates to one") {
  for (auto fam : {PolicyFamily::kGaussian, PolicyFamily::kCauchy}) {
    for (double sigma : {0.3, 1.0, 2.5}) {
      const PolicyModel<double> p(fam, Vec::Constant(1, 0.4), sigma, single_center());
      const double mu = p.mean(0.0);
      double mass;
      if (fam == PolicyFamily::kGaussian) {
        mass = oracle::simpson([&](double a) { return std::exp(log_density(p, 0.0, a)); }, mu - 10 * sigma,
                               mu + 10 * sigma, 20000);
      } else {
        const double R = 1e4 * sigma;
        const double tails = 2.0 / std::numbers::pi * std::atan(sigma / R);
        mass = oracle::simpson([&](double x) { return std::exp(log_density(p, 0.0, mu + sigma * std::sinh(x))) *
                                                      sigma * std::cosh(x); },
                               -std::asinh(R / sigma), std::asinh(R / sigma), 200000) +
               tails;
      }
      CHECK(std::abs(mass - 1.0) < 1e-6);
    }
  }
}

TEST_CASE("sample_action: scale collapse and Cauchy quartiles") {
  Rng rng(3);
  const PolicyModel<double> tiny(PolicyFamily::kCauchy, Vec::Constant(1, 0.5), 1e-9, single_center());
  std::vector<double> draws(101);
  for (double& d : draws) d = sample_action(tiny, 0.0, rng);
  std::nth_element(draws.begin(), draws.begin() + 50, draws.end());
  CHECK(std::abs(draws[50] - 0.5) < 1e-6);

  const PolicyModel<double> c(PolicyFamily::kCauchy, Vec::Constant(1, 1.5), 1.0, single_center());
  const int n = 1000000;
  std::vector<double> xs(n);
  int outside = 0;
  for (double& x : xs) {
    x = sample_action(c, 0.0, rng);
    if (std::abs(x - 1.5) > 1.0) ++outside;
  }
  std::nth_element(xs.begin(), xs.begin() + n / 2, xs.end());
  CHECK(std::abs(xs[n / 2] - 1.5) < 0.01);
  CHECK(std::abs(static_cast<double>(outside) / n - 0.5) < 0.01);
}

TEST_CASE("sample_action: Gaussian moments and determinism") {
  const PolicyModel<double> g(PolicyFamily::kGaussian, Vec::Constant(1, -2.0), 0.5, single_center());
  Rng a(11), b(11);
  double sum = 0, sq = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double x = sample_action(g, 0.0, a);
    CHECK(x == sample_action(g, 0.0, b));
    sum += x;
    sq += x * x;
  }
  const double mean = sum / n;
  CHECK(mean == doctest::Approx(-2.0).epsilon(0.005));
  CHECK(sq / n - mean * mean == doctest::Approx(0.25).epsilon(0.02));
}

TEST_CASE("score: vanishes at the mean and attains D/sigma at one scale") {
  for (auto fam : {PolicyFamily::kGaussian, PolicyFamily::kCauchy}) {
    const PolicyModel<double> p(fam, Vec::Constant(1, 0.3), 0.7, single_center());
    CHECK(score(p, 0.0, p.mean(0.0)).norm() == 0.0);
  }
  const PolicyModel<double> c(PolicyFamily::kCauchy, Vec::Constant(1, 0.3), 0.7, single_center());
  CHECK(score(c, 0.0, c.mean(0.0) + 0.7).norm() == doctest::Approx(1.0 / 0.7).epsilon(1e-14));
}

TEST_CASE("score matches finite differences of log_density (property)") {
  oracle::Gen gen(4);
  const auto map = FeatureMap<double>::evenly_spaced(-2.0, 2.0, 3);
  const double h = 1e-5;
  for (int i = 0; i < 2000; ++i) {
    const auto fam = i % 2 ? PolicyFamily::kCauchy : PolicyFamily::kGaussian;
    const double sigma = gen.uniform(0.3, 3.0);
    const Vec theta = random_vec(gen, 3, 1.0);
    const double s = gen.uniform(-3, 3);
    const double a = theta.dot(map(s)) + sigma * gen.uniform(-4, 4);
    const PolicyModel<double> p(fam, theta, sigma, map);
    const Vec sc = score(p, s, a);
    Vec fd(3);
    for (int j = 0; j < 3; ++j) {
      Vec up = theta, dn = theta;
      up[j] += h;
      dn[j] -= h;
      fd[j] = (oracle_logpdf(fam, a, up.dot(map(s)), sigma) - oracle_logpdf(fam, a, dn.dot(map(s)), sigma)) /
              (2 * h);
    }
    CHECK((sc - fd).norm() <= 1e-6 * std::max(1.0, sc.norm()));
  }
}

TEST_CASE("score_bound: Cauchy D/sigma, Gaussian unbounded") {
  const PolicyModel<double> c1(PolicyFamily::kCauchy, Vec::Zero(1), 1.0, single_center());
  const PolicyModel<double> c2(PolicyFamily::kCauchy, Vec::Zero(1), 0.5, single_center());
  const PolicyModel<double> g(PolicyFamily::kGaussian, Vec::Zero(1), 0.5, single_center());
  CHECK(*score_bound(c1) == 1.0);
  CHECK(*score_bound(c2) == 2.0);
  CHECK_FALSE(score_bound(g).has_value());
  const PolicyModel<double> lin(PolicyFamily::kCauchy, Vec::Zero(1), 1.0, FeatureMap<double>::linear());
  CHECK_FALSE(score_bound(lin).has_value());
}

TEST_CASE("Cauchy score stays below the bound (property)") {
  oracle::Gen gen(5);
  const auto map = FeatureMap<double>::evenly_spaced(-4.0, 3.709, 8);
  for (int i = 0; i < 20000; ++i) {
    const double sigma = gen.uniform(0.05, 5.0);
    const PolicyModel<double> p(PolicyFamily::kCauchy, random_vec(gen, 8, 5.0), sigma, map);
    const double a = gen.uniform(-1, 1) * std::pow(10.0, gen.uniform(-3, 6));
    CHECK(score(p, gen.uniform(-4, 3.709), a).norm() <= *score_bound(p) + 1e-12);
  }
}

TEST_CASE("kl_same_scale: closed forms, quadrature, and positivity") {
  const std::vector<double> s0{0.0};
  const PolicyModel<double> g(PolicyFamily::kGaussian, Vec::Zero(1), 1.0, single_center());
  const PolicyModel<double> c(PolicyFamily::kCauchy, Vec::Zero(1), 1.0, single_center());
  const Vec zero = Vec::Zero(1), one = Vec::Constant(1, 1.0), two = Vec::Constant(1, 2.0);
  CHECK(kl_same_scale(g, one, one, std::span<const double>(s0)) == 0.0);
  CHECK(kl_same_scale(g, one, zero, std::span<const double>(s0)) == doctest::Approx(0.5).epsilon(1e-15));
  const double kl_c = kl_same_scale(c, two, zero, std::span<const double>(s0));
  CHECK(kl_c == doctest::Approx(std::log(2.0)).epsilon(1e-15));

  const double quad = oracle::integrate_line(
      [](double a) {
        const double p = oracle::cauchy_pdf(a, 2.0, 1.0);
        return p * std::log(p / oracle::cauchy_pdf(a, 0.0, 1.0));
      },
      1.0, 1.0);
  CHECK(std::abs(quad - kl_c) < 1e-6);

  CHECK_THROWS_AS(kl_same_scale(g, one, zero, std::span<const double>()), std::invalid_argument);

  oracle::Gen gen(6);
  const auto map = FeatureMap<double>::evenly_spaced(-2.0, 2.0, 4);
  std::vector<double> states{-1.5, -0.2, 0.9, 1.7};
  for (int i = 0; i < 1000; ++i) {
    const auto fam = i % 2 ? PolicyFamily::kCauchy : PolicyFamily::kGaussian;
    const PolicyModel<double> p(fam, Vec::Zero(4), gen.uniform(0.2, 2.0), map);
    const Vec x = random_vec(gen, 4, 1.0);
    const Vec y = random_vec(gen, 4, 1.0);
    CHECK(kl_same_scale(p, x, y, std::span<const double>(states)) > 0.0);
    CHECK(kl_same_scale(p, x, x, std::span<const double>(states)) == 0.0);
  }
}

TEST_CASE("Gaussian KL matches quadrature for random shifts") {
  oracle::Gen gen(7);
  for (int i = 0; i < 5; ++i) {
    const double delta = gen.uniform(-2, 2);
    const double sigma = gen.uniform(0.5, 2);
    const double quad = oracle::simpson(
        [&](double a) {
          const double p = oracle::gaussian_pdf(a, delta, sigma);
          return p * std::log(p / oracle::gaussian_pdf(a, 0.0, sigma));
        },
        delta - 12 * sigma, delta + 12 * sigma, 20000);
    CHECK(std::abs(quad - kl_mean_shift(PolicyFamily::kGaussian, sigma, delta)) < 1e-9);
  }
}
