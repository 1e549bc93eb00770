#include "muselet/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "muselet/special.hpp"

namespace muselet {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept {
  return splitmix64(seed ^ splitmix64(index + 0x632BE59BD9B4E019ULL));
}

std::uint64_t Rng::next() noexcept {
  state_ = state_ * 6364136223846793005ULL + 1442695040888963407ULL;
  return splitmix64(state_);
}

double Rng::uniform() noexcept {
  return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

std::size_t Rng::below(std::size_t n) noexcept {
  if (n <= 1) return 0;
  // Rejection keeps the draw unbiased.
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t r;
  do {
    r = next();
  } while (r >= limit);
  return static_cast<std::size_t>(r % n);
}

double Rng::normal() noexcept {
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double Rng::log_gamma_draw(double shape) {
  if (!(shape > 0.0)) throw std::invalid_argument("gamma shape must be positive");
  double log_boost = 0.0;
  if (shape < 1.0) {
    double u = uniform();
    while (u <= 0.0) u = uniform();
    log_boost = std::log(u) / shape;
    shape += 1.0;
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform();
    if (u < 1.0 - 0.0331 * x * x * x * x) return std::log(d * v) + log_boost;
    if (u > 0.0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) {
      return std::log(d * v) + log_boost;
    }
  }
}

double Rng::gamma(double shape) { return std::exp(log_gamma_draw(shape)); }

Eigen::VectorXd Rng::dirichlet(const Eigen::VectorXd& alpha) {
  Eigen::VectorXd logs(alpha.size());
  for (Eigen::Index i = 0; i < alpha.size(); ++i) logs[i] = log_gamma_draw(alpha[i]);
  const double lse = log_sum_exp(logs);
  return (logs.array() - lse).exp().matrix();
}

Eigen::VectorXd Rng::dirichlet(double alpha, Eigen::Index dim) {
  return dirichlet(Eigen::VectorXd::Constant(dim, alpha));
}

std::size_t Rng::categorical(std::span<const double> weights) noexcept {
  double total = 0.0;
  for (double w : weights) total += w;
  const double target = uniform() * total;
  double acc = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] <= 0.0) continue;
    acc += weights[i];
    last_positive = i;
    if (target < acc) return i;
  }
  return last_positive;
}

std::size_t Rng::categorical(const Eigen::VectorXd& weights) noexcept {
  return categorical(std::span<const double>(weights.data(), static_cast<std::size_t>(weights.size())));
}

}  // namespace muselet
