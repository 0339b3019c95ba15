#pragma once

#include <Eigen/Dense>

#include <cmath>

namespace chemo {

/**
 * Matrix exponential by scaling and squaring with a truncated Taylor series.
 *
 * The argument is scaled by 2^-s so that its 1-norm is at most 1/2, the series
 * is summed until terms drop below machine precision relative to the partial
 * sum, and the result is squared s times. Intended for small dense matrices.
 */
template <typename Derived>
typename Derived::PlainObject expm(const Eigen::MatrixBase<Derived>& a) {
  using Plain = typename Derived::PlainObject;
  using Real = typename Eigen::NumTraits<typename Derived::Scalar>::Real;
  const Real norm1 = a.cwiseAbs().colwise().sum().maxCoeff();
  int squarings = 0;
  if (norm1 > Real(0.5)) squarings = static_cast<int>(std::ceil(std::log2(norm1 / Real(0.5))));
  const Plain scaled = a / std::ldexp(Real(1), squarings);

  Plain result = Plain::Identity(a.rows(), a.cols());
  Plain term = Plain::Identity(a.rows(), a.cols());
  for (int k = 1; k < 40; ++k) {
    term = (term * scaled) / Real(k);
    result += term;
    if (term.norm() <= Eigen::NumTraits<Real>::epsilon() * result.norm() * Real(1e-2)) break;
  }
  for (int i = 0; i < squarings; ++i) result = (result * result).eval();
  return result;
}

}  // namespace chemo
