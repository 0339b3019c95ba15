#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace chemo {

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorXc = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1>;
template <typename Scalar>
using MatrixXc = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic>;

/**
 * Uniform periodic grid on the n-torus [0, L)^n with N points per axis.
 *
 * Points and Fourier modes share one flattened index with axis 0 slowest:
 * i = (i_0 * N + i_1) * N + i_2. Mode indices follow FFT ordering, so index
 * j on an axis carries the integer wavenumber j for j < N/2 and j - N
 * otherwise (the Nyquist index N/2 maps to -N/2).
 */
template <typename Scalar>
class Grid {
 public:
  Grid() = default;

  Grid(int dim, int points_per_dim, Scalar length)
      : dim_(dim), points_(points_per_dim), length_(length) {
    if (dim < 1 || dim > 3)
      throw std::invalid_argument("grid dimension must be 1, 2 or 3, got " + std::to_string(dim));
    if (points_per_dim < 8 || (points_per_dim & (points_per_dim - 1)) != 0)
      throw std::invalid_argument("points per dimension must be a power of two >= 8, got " +
                                  std::to_string(points_per_dim));
    if (!(length > 0) || !std::isfinite(static_cast<double>(length)))
      throw std::invalid_argument("grid length must be positive and finite");
    spacing_ = length_ / static_cast<Scalar>(points_);
    size_ = 1;
    for (int d = 0; d < dim_; ++d) size_ *= points_;
  }

  int dim() const { return dim_; }
  int points_per_dim() const { return points_; }
  Scalar length() const { return length_; }
  Scalar spacing() const { return spacing_; }
  /// Total number of points (equal to the number of Fourier modes).
  Eigen::Index size() const { return size_; }
  /// Cell volume h^n used by the quadrature rules.
  Scalar cell_volume() const { return std::pow(spacing_, dim_); }
  Scalar volume() const { return std::pow(length_, dim_); }

  /// Integer wavenumber of FFT index j along one axis.
  int mode_number(int j) const { return j < points_ / 2 ? j : j - points_; }

  Scalar wavenumber(int j) const {
    return Scalar(2) * std::numbers::pi_v<Scalar> * Scalar(mode_number(j)) / length_;
  }

  /// Wavenumber used by odd (first-derivative) symbols: the Nyquist entry is
  /// zeroed so that real fields stay real under i*xi multipliers.
  Scalar odd_wavenumber(int j) const { return j == points_ / 2 ? Scalar(0) : wavenumber(j); }

  /// Per-axis FFT index of a flattened index.
  int axis_index(Eigen::Index flat, int axis) const {
    Eigen::Index stride = 1;
    for (int d = dim_ - 1; d > axis; --d) stride *= points_;
    return static_cast<int>((flat / stride) % points_);
  }

  Scalar coordinate(Eigen::Index flat, int axis) const {
    return spacing_ * static_cast<Scalar>(axis_index(flat, axis));
  }

  /// Wave vector of a flattened mode index, odd-symbol convention.
  VectorX<Scalar> odd_wavevector(Eigen::Index flat) const {
    VectorX<Scalar> xi(dim_);
    for (int d = 0; d < dim_; ++d) xi(d) = odd_wavenumber(axis_index(flat, d));
    return xi;
  }

  /// |xi|^2 with the true wavenumbers (used by even symbols such as the Laplacian).
  Scalar wavenumber_squared(Eigen::Index flat) const {
    Scalar sum = 0;
    for (int d = 0; d < dim_; ++d) {
      const Scalar k = wavenumber(axis_index(flat, d));
      sum += k * k;
    }
    return sum;
  }

  bool is_nyquist(Eigen::Index flat) const {
    for (int d = 0; d < dim_; ++d)
      if (axis_index(flat, d) == points_ / 2) return true;
    return false;
  }

  friend bool operator==(const Grid& a, const Grid& b) {
    return a.dim_ == b.dim_ && a.points_ == b.points_ && a.length_ == b.length_;
  }

 private:
  int dim_ = 1;
  int points_ = 8;
  Scalar length_ = 1;
  Scalar spacing_ = Scalar(1) / 8;
  Eigen::Index size_ = 8;
};

template <typename Scalar = double>
Grid<Scalar> make_grid(int dim, int points_per_dim, Scalar length) {
  return Grid<Scalar>(dim, points_per_dim, length);
}

}  // namespace chemo
