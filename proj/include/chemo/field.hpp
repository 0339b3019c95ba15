#pragma once

#include "chemo/grid.hpp"

#include <unsupported/Eigen/FFT>

#include <stdexcept>
#include <vector>

namespace chemo {

template <typename Scalar>
struct ScalarField {
  Grid<Scalar> grid;
  VectorX<Scalar> values;

  ScalarField() = default;
  explicit ScalarField(const Grid<Scalar>& g) : grid(g), values(VectorX<Scalar>::Zero(g.size())) {}
  ScalarField(const Grid<Scalar>& g, VectorX<Scalar> v) : grid(g), values(std::move(v)) {
    if (values.size() != grid.size()) throw std::invalid_argument("field size does not match grid");
  }

  bool all_finite() const { return values.allFinite(); }
};

/// Vector-valued field; column j holds component j.
template <typename Scalar>
struct VectorField {
  Grid<Scalar> grid;
  MatrixX<Scalar> values;

  VectorField() = default;
  explicit VectorField(const Grid<Scalar>& g)
      : grid(g), values(MatrixX<Scalar>::Zero(g.size(), g.dim())) {}

  int components() const { return static_cast<int>(values.cols()); }
  ScalarField<Scalar> component(int j) const { return {grid, values.col(j)}; }
  void set_component(int j, const ScalarField<Scalar>& f) { values.col(j) = f.values; }

  /// Pointwise Euclidean magnitude |v(x)|.
  ScalarField<Scalar> magnitude() const { return {grid, values.rowwise().norm()}; }
  bool all_finite() const { return values.allFinite(); }
};

/**
 * Fourier coefficients of w = (u, v_1..v_n) (columns of w_hat) and of phi.
 * Coefficients are unnormalized DFT values in FFT ordering.
 */
template <typename Scalar>
struct SpectralState {
  Grid<Scalar> grid;
  MatrixXc<Scalar> w_hat;
  VectorXc<Scalar> phi_hat;

  SpectralState() = default;
  explicit SpectralState(const Grid<Scalar>& g)
      : grid(g),
        w_hat(MatrixXc<Scalar>::Zero(g.size(), g.dim() + 1)),
        phi_hat(VectorXc<Scalar>::Zero(g.size())) {}

  bool all_finite() const { return w_hat.allFinite() && phi_hat.allFinite(); }
};

namespace detail {

template <typename Scalar>
Eigen::FFT<Scalar>& fft_engine() {
  thread_local Eigen::FFT<Scalar> engine;
  return engine;
}

// In-place complex transform along every axis of a flattened n-D array.
template <typename Scalar>
void transform_axes(const Grid<Scalar>& grid, VectorXc<Scalar>& data, bool inverse) {
  using Complex = std::complex<Scalar>;
  auto& engine = fft_engine<Scalar>();
  const int n = grid.points_per_dim();
  std::vector<Complex> in(n), out(n);
  for (int axis = 0; axis < grid.dim(); ++axis) {
    Eigen::Index stride = 1;
    for (int d = grid.dim() - 1; d > axis; --d) stride *= n;
    const Eigen::Index block = stride * n;
    for (Eigen::Index base = 0; base < grid.size(); base += block) {
      for (Eigen::Index offset = 0; offset < stride; ++offset) {
        const Eigen::Index start = base + offset;
        for (int j = 0; j < n; ++j) in[j] = data(start + j * stride);
        if (inverse)
          engine.inv(out.data(), in.data(), n);
        else
          engine.fwd(out.data(), in.data(), n);
        for (int j = 0; j < n; ++j) data(start + j * stride) = out[j];
      }
    }
  }
}

}  // namespace detail

/// Unnormalized forward DFT of a real array laid out on `grid`.
template <typename Scalar, typename Derived>
VectorXc<Scalar> forward_transform(const Grid<Scalar>& grid, const Eigen::MatrixBase<Derived>& values) {
  VectorXc<Scalar> out(grid.size());
  if (grid.dim() == 1) {
    const VectorX<Scalar> in = values;
    detail::fft_engine<Scalar>().fwd(out.data(), in.data(), grid.size());
    return out;
  }
  out = values.template cast<std::complex<Scalar>>();
  detail::transform_axes(grid, out, false);
  return out;
}

/// Inverse DFT (scaled by 1/N^n); the imaginary part is discarded.
template <typename Scalar, typename Derived>
VectorX<Scalar> inverse_transform(const Grid<Scalar>& grid, const Eigen::MatrixBase<Derived>& coefficients) {
  if (grid.dim() == 1) {
    VectorXc<Scalar> in = coefficients;
    VectorX<Scalar> out(grid.size());
    detail::fft_engine<Scalar>().inv(out.data(), in.data(), grid.size());
    return out;
  }
  VectorXc<Scalar> data = coefficients;
  detail::transform_axes(grid, data, true);
  return data.real();
}

template <typename Scalar>
VectorXc<Scalar> forward(const ScalarField<Scalar>& f) {
  return forward_transform(f.grid, f.values);
}

template <typename Scalar, typename Derived>
ScalarField<Scalar> inverse(const Grid<Scalar>& grid, const Eigen::MatrixBase<Derived>& coefficients) {
  return {grid, inverse_transform(grid, coefficients)};
}

}  // namespace chemo
