#pragma once

// Reference computations for tests. Deliberately independent of the library:
// plain composite rules and textbook formulas.

#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <random>

namespace oracle {

/// Composite Simpson with n (even) panels on [a, b].
inline double simpson(const std::function<double(double)>& f, double a, double b, int n) {
  if (n % 2) ++n;
  const double h = (b - a) / n;
  double sum = f(a) + f(b);
  for (int i = 1; i < n; ++i) sum += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return sum * h / 3.0;
}

/// Integral over the whole real line via x = center + scale * tan(u).
inline double integrate_line(const std::function<double(double)>& f, double center, double scale,
                             int n = 400000) {
  const double half = std::numbers::pi / 2;
  const double eps = 1e-12;
  return simpson(
      [&](double u) {
        const double c = std::cos(u);
        return f(center + scale * std::tan(u)) * scale / (c * c);
      },
      -half + eps, half - eps, n);
}

inline double gaussian_pdf(double x, double mu, double sigma) {
  const double z = (x - mu) / sigma;
  return std::exp(-0.5 * z * z) / (sigma * std::sqrt(2 * std::numbers::pi));
}

inline double cauchy_pdf(double x, double mu, double sigma) {
  const double z = (x - mu) / sigma;
  return 1.0 / (std::numbers::pi * sigma * (1 + z * z));
}

inline double gaussian_logpdf(double x, double mu, double sigma) {
  const double z = (x - mu) / sigma;
  return -0.5 * z * z - std::log(sigma) - 0.5 * std::log(2 * std::numbers::pi);
}

inline double cauchy_logpdf(double x, double mu, double sigma) {
  const double z = (x - mu) / sigma;
  return -std::log(std::numbers::pi * sigma) - std::log(1 + z * z);
}

inline double normal_density(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2 * std::numbers::pi); }

struct Gen {
  std::mt19937_64 rng;
  explicit Gen(std::uint64_t seed) : rng(seed) {}
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
  double normal() { return std::normal_distribution<double>(0, 1)(rng); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
};

}  // namespace oracle
