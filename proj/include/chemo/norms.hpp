#pragma once

#include "chemo/field.hpp"

#include <stdexcept>
#include <string_view>

namespace chemo {

enum class NormKind { L1, L2, Linf };

inline std::string_view to_string(NormKind kind) {
  switch (kind) {
    case NormKind::L1: return "L1";
    case NormKind::L2: return "L2";
    case NormKind::Linf: return "Linf";
  }
  return "?";
}

/// Discrete Lebesgue norms with the h^n-weighted point sum as quadrature.
template <typename Scalar, typename Derived>
Scalar grid_norm(const Grid<Scalar>& grid, const Eigen::MatrixBase<Derived>& values, NormKind kind) {
  if (!values.allFinite()) throw std::domain_error("norm of a non-finite field");
  switch (kind) {
    case NormKind::L1: return grid.cell_volume() * values.cwiseAbs().sum();
    case NormKind::L2: return std::sqrt(grid.cell_volume() * values.squaredNorm());
    case NormKind::Linf: return values.size() == 0 ? Scalar(0) : values.cwiseAbs().maxCoeff();
  }
  return Scalar(0);
}

template <typename Scalar>
Scalar norm(const ScalarField<Scalar>& f, NormKind kind) {
  return grid_norm(f.grid, f.values, kind);
}

/// Norm of the pointwise magnitude |v(x)|.
template <typename Scalar>
Scalar norm(const VectorField<Scalar>& v, NormKind kind) {
  return grid_norm(v.grid, v.values.rowwise().norm(), kind);
}

/// L2 norm evaluated from DFT coefficients (Parseval).
template <typename Scalar, typename Derived>
Scalar spectral_l2_norm(const Grid<Scalar>& grid, const Eigen::MatrixBase<Derived>& coefficients) {
  const Scalar n = static_cast<Scalar>(grid.size());
  return std::sqrt(grid.volume() * coefficients.squaredNorm() / (n * n));
}

/// H^s norm sqrt(sum (1+|xi|^2)^s |f_k|^2) normalized so that s = 0 gives the L2 norm.
template <typename Scalar, typename Derived>
Scalar sobolev_norm_spectral(const Grid<Scalar>& grid, const Eigen::MatrixBase<Derived>& coefficients,
                             Scalar s) {
  if (s < 0) throw std::invalid_argument("Sobolev index must be nonnegative");
  Scalar sum = 0;
  for (Eigen::Index k = 0; k < grid.size(); ++k)
    sum += std::pow(Scalar(1) + grid.wavenumber_squared(k), s) * std::norm(coefficients(k));
  const Scalar n = static_cast<Scalar>(grid.size());
  return std::sqrt(grid.volume() * sum / (n * n));
}

template <typename Scalar>
Scalar sobolev_norm(const ScalarField<Scalar>& f, Scalar s) {
  return sobolev_norm_spectral(f.grid, forward(f), s);
}

}  // namespace chemo
