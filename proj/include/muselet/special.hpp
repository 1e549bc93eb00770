#pragma once

#include <Eigen/Core>
#include <cmath>
#include <limits>

namespace muselet {

// Psi(x) = d/dx ln Gamma(x), for x > 0.
double digamma(double x);
// Psi'(x), for x > 0.
double trigamma(double x);

inline double log_gamma(double x) { return std::lgamma(x); }

/// log(sum(exp(v))) with max-subtraction; -inf for an empty or all -inf input.
template <typename Derived>
typename Derived::Scalar log_sum_exp(const Eigen::DenseBase<Derived>& v) {
  using Scalar = typename Derived::Scalar;
  if (v.size() == 0) return -std::numeric_limits<Scalar>::infinity();
  const Scalar m = v.maxCoeff();
  if (!std::isfinite(m)) return m;
  return m + std::log((v.derived().array() - m).exp().sum());
}

/// Elementwise digamma.
template <typename Derived>
Eigen::Array<typename Derived::Scalar, Derived::RowsAtCompileTime, Derived::ColsAtCompileTime>
digamma_each(const Eigen::ArrayBase<Derived>& x) {
  return x.derived().unaryExpr([](typename Derived::Scalar v) { return digamma(v); });
}

/// Elementwise ln Gamma.
template <typename Derived>
Eigen::Array<typename Derived::Scalar, Derived::RowsAtCompileTime, Derived::ColsAtCompileTime>
log_gamma_each(const Eigen::ArrayBase<Derived>& x) {
  return x.derived().unaryExpr([](typename Derived::Scalar v) { return std::lgamma(v); });
}

}  // namespace muselet
