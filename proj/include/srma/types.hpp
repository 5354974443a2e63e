#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace srma {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using Vec = Vector<double>;
using Mat = Matrix<double>;

using Rng = std::mt19937_64;

/// Uniform draw on the open interval (0, 1) built from the top 53 bits.
template <typename Engine>
inline double uniform_open(Engine& rng) {
  static_assert(Engine::max() == 0xffffffffffffffffULL, "64-bit engine required");
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1p-53;
}

inline double standard_normal(Rng& rng) {
  return std::normal_distribution<double>(0.0, 1.0)(rng);
}

/// splitmix64 finalizer, used to derive independent stream seeds.
constexpr std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t salt) {
  return mix_seed(master ^ mix_seed(salt));
}

class NumericalDivergence : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InnerSolverDiverged : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class QuadratureNotConverged : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace srma
