#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <span>
#include <vector>

namespace muselet {

std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Sub-seed for stream `index` of a run seeded with `seed`.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept;

/// Portable 64-bit generator: a linear congruential state update
///   s <- s * 6364136223846793005 + 1442695040888963407  (mod 2^64)
/// whose output is the splitmix64 finalizer of the new state. All samplers
/// below are built only from `next()`, so streams are reproducible across
/// platforms and standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) noexcept : state_(splitmix64(seed)) {}

  std::uint64_t next() noexcept;
  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept;
  /// Uniform integer on [0, n).
  std::size_t below(std::size_t n) noexcept;
  /// Standard normal by the Box-Muller transform (one draw per call).
  double normal() noexcept;
  /// Gamma(shape, 1) by Marsaglia-Tsang; shape < 1 uses the u^(1/shape) boost.
  double gamma(double shape);
  /// ln of a Gamma(shape, 1) draw; finite even when the draw underflows.
  double log_gamma_draw(double shape);
  /// Dirichlet via normalized Gamma draws (normalized in log space).
  Eigen::VectorXd dirichlet(const Eigen::VectorXd& alpha);
  Eigen::VectorXd dirichlet(double alpha, Eigen::Index dim);
  /// Index drawn proportionally to non-negative `weights`.
  std::size_t categorical(std::span<const double> weights) noexcept;
  std::size_t categorical(const Eigen::VectorXd& weights) noexcept;

  template <typename T>
  void shuffle(std::vector<T>& v) noexcept {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[below(i)]);
    }
  }

 private:
  std::uint64_t state_;
};

}  // namespace muselet
