#pragma once

#include <Eigen/Core>

#include <cmath>
#include <limits>

// Small expression-friendly reductions shared across modules. They accept any
// dense Eigen expression so callers can pass segments, blocks or products
// without materialising a temporary.
namespace rppg::stats {

template <typename Derived>
typename Derived::Scalar mean(const Eigen::DenseBase<Derived>& x) {
  return x.sum() / static_cast<typename Derived::Scalar>(x.size());
}

/// Standard deviation with the (n - 1) denominator. Returns 0 for n < 2.
template <typename Derived>
typename Derived::Scalar sample_std(const Eigen::DenseBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  const auto n = x.size();
  if (n < 2) return Scalar(0);
  const Scalar mu = mean(x);
  const Scalar ss = (x.derived().array() - mu).square().sum();
  return std::sqrt(ss / static_cast<Scalar>(n - 1));
}

/// Standard deviation with the n denominator.
template <typename Derived>
typename Derived::Scalar population_std(const Eigen::DenseBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  const auto n = x.size();
  if (n < 1) return Scalar(0);
  const Scalar mu = mean(x);
  const Scalar ss = (x.derived().array() - mu).square().sum();
  return std::sqrt(ss / static_cast<Scalar>(n));
}

/// Pearson correlation. NaN when either input has zero variance.
template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar pearson(const Eigen::DenseBase<DerivedA>& a,
                                  const Eigen::DenseBase<DerivedB>& b) {
  using Scalar = typename DerivedA::Scalar;
  const auto da = (a.derived().array() - mean(a)).eval();
  const auto db = (b.derived().array() - mean(b)).eval();
  const Scalar saa = da.square().sum();
  const Scalar sbb = db.square().sum();
  if (saa <= Scalar(0) || sbb <= Scalar(0)) return std::numeric_limits<Scalar>::quiet_NaN();
  return (da * db).sum() / std::sqrt(saa * sbb);
}

}  // namespace rppg::stats
