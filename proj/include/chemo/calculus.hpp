#pragma once

#include "chemo/field.hpp"

namespace chemo {

// Spectral derivatives. First-derivative symbols i*xi use the odd wavenumber
// convention (Nyquist zeroed); the Laplacian uses -|xi|^2 on every mode, so
// divergence(grad f) and laplacian(f) coincide on all non-Nyquist modes.

template <typename Scalar>
VectorXc<Scalar> spectral_partial(const Grid<Scalar>& grid, const VectorXc<Scalar>& f_hat, int axis) {
  using Complex = std::complex<Scalar>;
  VectorXc<Scalar> out(f_hat.size());
  for (Eigen::Index k = 0; k < grid.size(); ++k)
    out(k) = Complex(0, grid.odd_wavenumber(grid.axis_index(k, axis))) * f_hat(k);
  return out;
}

template <typename Scalar>
VectorXc<Scalar> spectral_laplacian(const Grid<Scalar>& grid, const VectorXc<Scalar>& f_hat) {
  VectorXc<Scalar> out(f_hat.size());
  for (Eigen::Index k = 0; k < grid.size(); ++k) out(k) = -grid.wavenumber_squared(k) * f_hat(k);
  return out;
}

/// i * xi . v_hat where column j of v_hat holds component j.
template <typename Scalar>
VectorXc<Scalar> spectral_divergence(const Grid<Scalar>& grid, const MatrixXc<Scalar>& v_hat) {
  VectorXc<Scalar> out = VectorXc<Scalar>::Zero(grid.size());
  for (int j = 0; j < grid.dim(); ++j) out += spectral_partial(grid, VectorXc<Scalar>(v_hat.col(j)), j);
  return out;
}

template <typename Scalar>
VectorField<Scalar> grad(const ScalarField<Scalar>& f) {
  VectorField<Scalar> out(f.grid);
  const VectorXc<Scalar> f_hat = forward(f);
  for (int j = 0; j < f.grid.dim(); ++j)
    out.values.col(j) = inverse_transform(f.grid, spectral_partial(f.grid, f_hat, j));
  return out;
}

template <typename Scalar>
ScalarField<Scalar> divergence(const VectorField<Scalar>& v) {
  MatrixXc<Scalar> v_hat(v.grid.size(), v.grid.dim());
  for (int j = 0; j < v.grid.dim(); ++j) v_hat.col(j) = forward_transform(v.grid, v.values.col(j));
  return inverse(v.grid, spectral_divergence(v.grid, v_hat));
}

template <typename Scalar>
ScalarField<Scalar> laplacian(const ScalarField<Scalar>& f) {
  return inverse(f.grid, spectral_laplacian(f.grid, forward(f)));
}

}  // namespace chemo
