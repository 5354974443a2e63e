#include "oracles.hpp"
#include "srma/mirror.hpp"

#include <doctest.h>

#include <vector>

using namespace srma;

namespace {

Vec random_vec(oracle::Gen& gen, Eigen::Index d, double scale) {
  Vec v(d);
  for (Eigen::Index i = 0; i < d; ++i) v[i] = scale * gen.normal();
  return v;
}

std::vector<double> random_states(oracle::Gen& gen, int n) {
  std::vector<double> s(static_cast<std::size_t>(n));
  for (double& x : s) x = gen.uniform(-4.0, 3.709);
  return s;
}

BregmanGeometry random_kl_geometry(oracle::Gen& gen, PolicyFamily fam, Eigen::Index d) {
  const auto map = FeatureMap<double>::evenly_spaced(-4.0, 3.709, d, 1.0, gen.uniform(0.1, 1.0));
  const PolicyModel<double> model(fam, Vec::Zero(d), gen.uniform(0.2, 2.0), map);
  return BregmanGeometry::policy_kl(model, random_states(gen, gen.integer(1, 30)));
}

/// Prox objective with the divergence written out from the family KL formulas.
double prox_objective(const BregmanGeometry& geom, const FeatureMap<double>& map, const Vec& g, const Vec& theta,
                      double eta, const Vec& x) {
  double kl = 0;
  for (double s : geom.state_batch) {
    const double delta = map(s).dot(x - theta);
    kl += geom.family == PolicyFamily::kGaussian
              ? delta * delta / (2 * geom.sigma * geom.sigma)
              : std::log(1 + delta * delta / (4 * geom.sigma * geom.sigma));
  }
  kl /= static_cast<double>(geom.state_batch.size());
  const double div = kl + 0.5 * geom.quadratic_weight * (x - theta).squaredNorm();
  return g.dot(x) - div / eta;
}

/// Grid search over nested boxes centered at `center`, refining around the best cell.
Vec grid_argmax(const std::function<double(const Vec&)>& f, Vec center, double half_width) {
  for (int level = 0; level < 6; ++level) {
    const int n = 200;
    double best = -std::numeric_limits<double>::infinity();
    Vec best_x = center;
    for (int i = 0; i <= n; ++i)
      for (int j = 0; j <= n; ++j) {
        Vec x(2);
        x << center[0] - half_width + 2 * half_width * i / n, center[1] - half_width + 2 * half_width * j / n;
        const double v = f(x);
        if (v > best) {
          best = v;
          best_x = x;
        }
      }
    center = best_x;
    half_width *= 0.05;
  }
  return center;
}

}  // namespace

TEST_CASE("geometry names") {
  CHECK(parse_geometry("euclidean") == GeometryKind::kEuclidean);
  CHECK(parse_geometry("policy_kl") == GeometryKind::kPolicyKL);
  CHECK_THROWS_AS(parse_geometry("entropy"), std::invalid_argument);
  CHECK(std::string(to_string(GeometryKind::kPolicyKL)) == "policy_kl");
}

TEST_CASE("bregman_div: examples") {
  const auto e = BregmanGeometry::euclidean();
  CHECK(e.zeta == 1.0);
  const Vec x = (Vec(2) << 3.0, 4.0).finished();
  CHECK(bregman_div(e, x, Vec::Zero(2)) == 12.5);
  CHECK(bregman_div(e, x, x) == 0.0);

  const auto map = FeatureMap<double>::radial_basis(Vec::Zero(1), 1.0, 1.0);
  const PolicyModel<double> g(PolicyFamily::kGaussian, Vec::Zero(1), 1.0, map);
  auto kl = BregmanGeometry::policy_kl(g, {0.0}, 0.0);
  CHECK(bregman_div(kl, Vec::Constant(1, 1.0), Vec::Zero(1)) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(bregman_div(kl, Vec::Constant(1, 0.3), Vec::Constant(1, 0.3)) == 0.0);

  CHECK_THROWS_AS(BregmanGeometry::policy_kl(g, {}), std::invalid_argument);
  BregmanGeometry empty = kl;
  empty.state_batch.clear();
  CHECK_THROWS_AS(bregman_div(empty, Vec::Zero(1), Vec::Zero(1)), std::invalid_argument);
}

TEST_CASE("policy-KL divergence: derivatives match finite differences") {
  oracle::Gen gen(1);
  for (int i = 0; i < 100; ++i) {
    const auto fam = i % 2 ? PolicyFamily::kCauchy : PolicyFamily::kGaussian;
    const auto geom = random_kl_geometry(gen, fam, 3);
    const Vec x = random_vec(gen, 3, 2.0), y = random_vec(gen, 3, 2.0);
    const double h = 1e-5;
    const Vec grad = bregman_div_gradient(geom, x, y);
    const Mat hess = bregman_div_hessian(geom, x, y);
    for (int j = 0; j < 3; ++j) {
      Vec up = x, dn = x;
      up[j] += h;
      dn[j] -= h;
      const double fd = (bregman_div(geom, up, y) - bregman_div(geom, dn, y)) / (2 * h);
      CHECK(grad[j] == doctest::Approx(fd).epsilon(1e-6).scale(1e-3));
      const Vec fd_col = (bregman_div_gradient(geom, up, y) - bregman_div_gradient(geom, dn, y)) / (2 * h);
      CHECK((hess.col(j) - fd_col).norm() <= 1e-5 * std::max(1.0, fd_col.norm()));
    }
  }
}

TEST_CASE("strong-convexity certificate on random pairs") {
  oracle::Gen gen(2);
  for (int i = 0; i < 2000; ++i) {
    const auto fam = i % 2 ? PolicyFamily::kCauchy : PolicyFamily::kGaussian;
    const auto geom = random_kl_geometry(gen, fam, 4);
    CHECK(geom.zeta > 0.0);
    CHECK(geom.zeta == certify_zeta(geom));
    const Vec x = random_vec(gen, 4, gen.uniform(0.01, 20.0)), y = random_vec(gen, 4, 3.0);
    const double d = bregman_div(geom, x, y);
    CHECK(d >= 0.5 * geom.zeta * (x - y).squaredNorm() * (1 - 1e-12));
  }
}

TEST_CASE("prox_step: Euclidean closed form") {
  const auto e = BregmanGeometry::euclidean();
  const Vec theta = (Vec(2) << 0.7, -0.2).finished();
  CHECK(prox_step(e, Vec::Zero(2), theta, 0.1) == theta);
  const Vec step = prox_step(e, (Vec(2) << 1.0, 2.0).finished(), Vec::Zero(2), 0.1);
  CHECK(step[0] == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(step[1] == doctest::Approx(0.2).epsilon(1e-15));
  CHECK_THROWS_AS(prox_step(e, Vec::Zero(2), theta, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(prox_step(e, Vec::Zero(3), theta, 0.1), std::invalid_argument);

  oracle::Gen gen(3);
  for (int i = 0; i < 100; ++i) {
    const Vec g = random_vec(gen, 5, 3.0), th = random_vec(gen, 5, 3.0);
    const double eta = gen.uniform(1e-4, 1.0);
    CHECK(prox_step(e, g, th, eta) == th + eta * g);
    CHECK(bregman_gradient(e, g, th, eta) == g);
  }
}

TEST_CASE("prox_step: policy-KL agrees with a grid search") {
  oracle::Gen gen(4);
  for (auto fam : {PolicyFamily::kGaussian, PolicyFamily::kCauchy}) {
    for (int i = 0; i < 4; ++i) {
      Vec centers(2);
      centers << -1.0, 1.0;
      const auto map = FeatureMap<double>::radial_basis(centers, 1.0, 1.0);
      const PolicyModel<double> model(fam, Vec::Zero(2), gen.uniform(0.5, 1.5), map);
      const auto geom = BregmanGeometry::policy_kl(model, {gen.uniform(-2, 2), gen.uniform(-2, 2), gen.uniform(-2, 2)});
      const Vec theta = random_vec(gen, 2, 0.5);
      const Vec g = random_vec(gen, 2, 1.0);
      const double eta = gen.uniform(0.05, 0.3);
      const Vec solved = prox_step(geom, g, theta, eta);
      const Vec grid = grid_argmax([&](const Vec& x) { return prox_objective(geom, map, g, theta, eta, x); },
                                   theta, 1.5 * eta * g.norm() / geom.zeta + 0.1);
      CHECK((solved - grid).norm() < 1e-3);
      // First-order optimality of the returned point.
      const Vec stat = g - bregman_div_gradient(geom, solved, theta) / eta;
      CHECK(stat.norm() < 1e-7);
    }
  }
}

TEST_CASE("prox_step: small Gaussian steps follow the inverse curvature") {
  const auto map = FeatureMap<double>::evenly_spaced(-1.0, 1.0, 2);
  const PolicyModel<double> model(PolicyFamily::kGaussian, Vec::Zero(2), 1.0, map);
  const auto geom = BregmanGeometry::policy_kl(model, {-0.8, 0.1, 0.9});
  const Vec theta = (Vec(2) << 0.2, -0.1).finished();
  const Vec g = (Vec(2) << 0.3, 0.5).finished();
  const double eta = 1e-3;
  const Mat h = bregman_div_hessian(geom, theta, theta);
  const Vec expected = theta + eta * h.ldlt().solve(g);
  CHECK((prox_step(geom, g, theta, eta) - expected).norm() < 1e-10);
}

TEST_CASE("generalized gradient: prop1 and prop2 on random inputs") {
  oracle::Gen gen(5);
  int cases = 0;
  for (int i = 0; i < 2000; ++i) {
    const auto fam = i % 2 ? PolicyFamily::kCauchy : PolicyFamily::kGaussian;
    const auto geom = i % 3 == 0 ? BregmanGeometry::euclidean() : random_kl_geometry(gen, fam, 4);
    const Vec theta = random_vec(gen, 4, 2.0);
    const Vec g1 = random_vec(gen, 4, std::pow(10.0, gen.uniform(-2, 2)));
    const Vec g2 = random_vec(gen, 4, std::pow(10.0, gen.uniform(-2, 2)));
    const double eta = std::pow(10.0, gen.uniform(-3, 0));
    const Vec G1 = bregman_gradient(geom, g1, theta, eta);
    const Vec G2 = bregman_gradient(geom, g2, theta, eta);
    CHECK(g1.dot(G1) >= geom.zeta * G1.squaredNorm() - 1e-7);
    CHECK((G1 - G2).norm() <= (g1 - g2).norm() / geom.zeta + 1e-7);
    if (geom.kind == GeometryKind::kEuclidean) CHECK(g1.dot(G1) == G1.squaredNorm());
    ++cases;
  }
  CHECK(cases == 2000);
}

TEST_CASE("bregman_gradient: zero gradient gives zero and the update identity holds") {
  oracle::Gen gen(6);
  for (int i = 0; i < 200; ++i) {
    const auto fam = i % 2 ? PolicyFamily::kCauchy : PolicyFamily::kGaussian;
    const auto geom = random_kl_geometry(gen, fam, 3);
    const Vec theta = random_vec(gen, 3, 1.0);
    const double eta = gen.uniform(0.001, 0.5);
    CHECK(bregman_gradient(geom, Vec::Zero(3), theta, eta).norm() == 0.0);
    const Vec g = random_vec(gen, 3, 1.0);
    const Vec next = prox_step(geom, g, theta, eta);
    const Vec G = bregman_gradient(geom, g, theta, eta);
    CHECK((theta + eta * G - next).norm() <= 1e-12 * (1 + next.norm()));
  }
}
