#pragma once

#include "chemo/matrix_exp.hpp"
#include "chemo/model.hpp"

#include <complex>
#include <stdexcept>
#include <utility>

namespace chemo {

/// Roots of lambda^2 + beta lambda + gamma^2 |xi|^2 = 0, ordered (slow, fast).
template <typename Scalar>
std::pair<std::complex<Scalar>, std::complex<Scalar>> damped_wave_eigen(Scalar xi_norm, Scalar gamma,
                                                                        Scalar beta) {
  using Complex = std::complex<Scalar>;
  const Complex d = std::sqrt(Complex(beta * beta / 4 - gamma * gamma * xi_norm * xi_norm, 0));
  const Scalar mu = -beta / 2;
  return {mu + d, mu - d};
}

/// Eigenvalue-branch transition radius beta / (2 gamma).
template <typename Scalar>
Scalar branch_radius(const ModelParams<Scalar>& params) {
  return params.beta / (2 * params.gamma);
}

/**
 * exp(t M(xi)) restricted to the longitudinal pair (u, xi_hat . v) plus the
 * transverse damping factor. With mu = -beta/2 and d = sqrt(beta^2/4 - gamma^2 k^2),
 *   E = e^{mu t} [cosh(dt) I + sinh(dt)/d (M2 - mu I)],
 *   M2 = [[0, -i gamma k], [-i gamma k, -beta]].
 */
template <typename Scalar>
struct DampedWaveBlock {
  std::complex<Scalar> e11, e12, e21, e22;
  Scalar transverse = 1;
};

template <typename Scalar>
DampedWaveBlock<Scalar> damped_wave_block(Scalar k, Scalar t, Scalar gamma, Scalar beta) {
  using Complex = std::complex<Scalar>;
  DampedWaveBlock<Scalar> block;
  block.transverse = std::exp(-beta * t);
  if (k == 0) {
    block.e11 = 1;
    block.e12 = 0;
    block.e21 = 0;
    block.e22 = block.transverse;
    return block;
  }
  const Scalar mu = -beta / 2;
  const Complex d = std::sqrt(Complex(beta * beta / 4 - gamma * gamma * k * k, 0));
  const Complex z = d * t;
  Complex c, s;  // e^{mu t} cosh(dt) and e^{mu t} sinh(dt)/d
  if (std::abs(z) < Scalar(0.1)) {
    const Complex z2 = z * z;
    const Complex cosh_series =
        Scalar(1) + z2 / Scalar(2) * (Scalar(1) + z2 / Scalar(12) * (Scalar(1) + z2 / Scalar(30) * (Scalar(1) + z2 / Scalar(56))));
    const Complex sinhc_series =
        Scalar(1) + z2 / Scalar(6) * (Scalar(1) + z2 / Scalar(20) * (Scalar(1) + z2 / Scalar(42) * (Scalar(1) + z2 / Scalar(72))));
    const Scalar damping = std::exp(mu * t);
    c = damping * cosh_series;
    s = damping * t * sinhc_series;
  } else {
    const Complex plus = std::exp((mu + d) * t);
    const Complex minus = std::exp((mu - d) * t);
    c = (plus + minus) / Scalar(2);
    s = (plus - minus) / (Scalar(2) * d);
  }
  const Complex off = Complex(0, -gamma * k) * s;
  block.e11 = c + s * (beta / 2);
  block.e12 = off;
  block.e21 = off;
  block.e22 = c - s * (beta / 2);
  return block;
}

/// M(xi) = -i sum_j A_j xi_j + B for the C-D system.
template <typename Scalar>
MatrixXc<Scalar> mode_symbol(const VectorX<Scalar>& xi, const ModelParams<Scalar>& params) {
  using Complex = std::complex<Scalar>;
  const SystemMatrices<Scalar> m = build_matrices(params, static_cast<int>(xi.size()));
  return Complex(0, -1) * m.flux_symbol(xi).template cast<Complex>() + m.B.template cast<Complex>();
}

/// Full (n+1)x(n+1) propagator assembled from the closed-form block.
template <typename Scalar>
MatrixXc<Scalar> closed_form_propagator(const VectorX<Scalar>& xi, Scalar t, const ModelParams<Scalar>& params) {
  using Complex = std::complex<Scalar>;
  const int n = static_cast<int>(xi.size());
  const Scalar k = xi.norm();
  const DampedWaveBlock<Scalar> block = damped_wave_block(k, t, params.gamma, params.beta);
  MatrixXc<Scalar> e = MatrixXc<Scalar>::Zero(n + 1, n + 1);
  e(0, 0) = block.e11;
  if (k == 0) {
    e.bottomRightCorner(n, n).diagonal().setConstant(block.transverse);
    return e;
  }
  const VectorX<Scalar> unit = xi / k;
  e.block(0, 1, 1, n) = (block.e12 * unit.transpose().template cast<Complex>());
  e.block(1, 0, n, 1) = (block.e21 * unit.template cast<Complex>());
  const MatrixX<Scalar> longitudinal = unit * unit.transpose();
  e.bottomRightCorner(n, n) =
      (block.e22 * longitudinal.template cast<Complex>()) +
      (Complex(block.transverse) * (MatrixX<Scalar>::Identity(n, n) - longitudinal).template cast<Complex>());
  return e;
}

/// Verification route: generic scaling-and-squaring exponential of t M(xi).
template <typename Scalar>
MatrixXc<Scalar> generic_propagator(const VectorX<Scalar>& xi, Scalar t, const ModelParams<Scalar>& params) {
  return expm((mode_symbol(xi, params) * t).eval());
}

/**
 * Per-mode closed-form propagator for a fixed time step, cached over the grid.
 * Applying it to w_hat realizes exp(t M(xi)) on every mode.
 */
template <typename Scalar>
class HyperbolicPropagator {
 public:
  HyperbolicPropagator(const Grid<Scalar>& grid, Scalar t, const ModelParams<Scalar>& params)
      : grid_(grid), t_(t), params_(params), blocks_(grid.size()), unit_(grid.size(), grid.dim()) {
    if (t < 0) throw std::invalid_argument("propagation time must be nonnegative");
    for (Eigen::Index m = 0; m < grid.size(); ++m) {
      const VectorX<Scalar> xi = grid.odd_wavevector(m);
      const Scalar k = xi.norm();
      blocks_[m] = damped_wave_block(k, t, params.gamma, params.beta);
      if (k > 0)
        unit_.row(m) = (xi / k).transpose();
      else
        unit_.row(m).setZero();
    }
  }

  const Grid<Scalar>& grid() const { return grid_; }
  Scalar time() const { return t_; }

  /// In-place application to w_hat (modes x (n+1)).
  void apply(MatrixXc<Scalar>& w_hat) const {
    using Complex = std::complex<Scalar>;
    const int n = grid_.dim();
    for (Eigen::Index m = 0; m < grid_.size(); ++m) {
      const DampedWaveBlock<Scalar>& e = blocks_[m];
      const Complex u = w_hat(m, 0);
      Complex q = 0;
      for (int j = 0; j < n; ++j) q += unit_(m, j) * w_hat(m, j + 1);
      const Complex u_new = e.e11 * u + e.e12 * q;
      const Complex q_new = e.e21 * u + e.e22 * q;
      w_hat(m, 0) = u_new;
      for (int j = 0; j < n; ++j) {
        const Complex vj = w_hat(m, j + 1);
        w_hat(m, j + 1) = unit_(m, j) * q_new + e.transverse * (vj - unit_(m, j) * q);
      }
    }
  }

 private:
  Grid<Scalar> grid_;
  Scalar t_;
  ModelParams<Scalar> params_;
  std::vector<DampedWaveBlock<Scalar>> blocks_;
  MatrixX<Scalar> unit_;
};

/**
 * Apply exp(t M(xi)) to every mode of w_hat. With `verify` set the generic
 * matrix exponential is evaluated on every mode as well; a disagreement above
 * 1e-8 (relative to the propagator norm) throws std::logic_error.
 */
template <typename Scalar>
MatrixXc<Scalar> propagate_hyperbolic(const Grid<Scalar>& grid, const MatrixXc<Scalar>& w_hat, Scalar t,
                                      const ModelParams<Scalar>& params, bool verify = false) {
  if (w_hat.rows() != grid.size() || w_hat.cols() != grid.dim() + 1)
    throw std::invalid_argument("w_hat shape does not match grid");
  MatrixXc<Scalar> out = w_hat;
  HyperbolicPropagator<Scalar>(grid, t, params).apply(out);
  if (verify) {
    for (Eigen::Index m = 0; m < grid.size(); ++m) {
      const VectorX<Scalar> xi = grid.odd_wavevector(m);
      const MatrixXc<Scalar> closed = closed_form_propagator(xi, t, params);
      const MatrixXc<Scalar> generic = generic_propagator(xi, t, params);
      const Scalar gap = (closed - generic).norm() / std::max(Scalar(1e-300), generic.norm());
      if (gap > Scalar(1e-8))
        throw std::logic_error("closed-form and generic propagators disagree (relative gap " +
                               std::to_string(static_cast<double>(gap)) + ")");
    }
  }
  return out;
}

/// Multiplier exp(-(diffusion |xi|^2 + decay) t) on every mode.
template <typename Scalar>
VectorX<Scalar> heat_multipliers(const Grid<Scalar>& grid, Scalar t, Scalar decay, Scalar diffusion) {
  if (t < 0) throw std::invalid_argument("propagation time must be nonnegative");
  if (!(diffusion > 0)) throw std::invalid_argument("diffusion must be positive");
  VectorX<Scalar> out(grid.size());
  for (Eigen::Index m = 0; m < grid.size(); ++m)
    out(m) = std::exp(-(diffusion * grid.wavenumber_squared(m) + decay) * t);
  return out;
}

/// Exact solution operator of phi_t = diffusion Lap phi - decay phi.
template <typename Scalar>
VectorXc<Scalar> propagate_heat(const Grid<Scalar>& grid, const VectorXc<Scalar>& phi_hat, Scalar t,
                                Scalar decay, Scalar diffusion = 1) {
  return (phi_hat.array() * heat_multipliers(grid, t, decay, diffusion).array().template cast<std::complex<Scalar>>())
      .matrix();
}

enum class KernelPart { Full, Diffusive, Hyperbolic };

/**
 * Sharp Fourier split of the hyperbolic propagator: the diffusive part K keeps
 * modes with |xi| <= cutoff, the hyperbolic part (script K) keeps the rest.
 */
template <typename Scalar>
struct KernelSplit {
  ModelParams<Scalar> params;
  Scalar cutoff_radius = 0;

  bool diffusive(const VectorX<Scalar>& xi) const { return xi.norm() <= cutoff_radius; }

  MatrixXc<Scalar> full_mode(const VectorX<Scalar>& xi, Scalar t) const {
    return closed_form_propagator(xi, t, params);
  }
  MatrixXc<Scalar> diffusive_mode(const VectorX<Scalar>& xi, Scalar t) const {
    const int n = static_cast<int>(xi.size());
    return diffusive(xi) ? full_mode(xi, t) : MatrixXc<Scalar>::Zero(n + 1, n + 1).eval();
  }
  MatrixXc<Scalar> hyperbolic_mode(const VectorX<Scalar>& xi, Scalar t) const {
    return full_mode(xi, t) - diffusive_mode(xi, t);
  }
  MatrixXc<Scalar> mode(const VectorX<Scalar>& xi, Scalar t, KernelPart part) const {
    switch (part) {
      case KernelPart::Full: return full_mode(xi, t);
      case KernelPart::Diffusive: return diffusive_mode(xi, t);
      case KernelPart::Hyperbolic: return hyperbolic_mode(xi, t);
    }
    return full_mode(xi, t);
  }
};

/// Split at `cutoff_radius`; a nonpositive value selects beta / (2 gamma).
template <typename Scalar>
KernelSplit<Scalar> split_kernel(const ModelParams<Scalar>& params, Scalar cutoff_radius = 0) {
  if (cutoff_radius < 0) throw std::invalid_argument("cutoff radius must be positive");
  return {params, cutoff_radius > 0 ? cutoff_radius : branch_radius(params)};
}

/// Effective diffusivity gamma^2 / beta of the slow eigenvalue branch.
template <typename Scalar>
Scalar effective_diffusivity(const ModelParams<Scalar>& params) {
  return params.gamma * params.gamma / params.beta;
}

/**
 * Leading heat-kernel block of the diffusive part, in Fourier variables:
 *   G(xi,t) = e^{-D |xi|^2 t} [[1, -i c xi^T], [-i c xi, -c^2 xi xi^T]],
 * with D = gamma^2/beta and c = gamma/beta (the slow eigenprojector to first order).
 */
template <typename Scalar>
MatrixXc<Scalar> heat_expansion_mode(const VectorX<Scalar>& xi, Scalar t, const ModelParams<Scalar>& params) {
  using Complex = std::complex<Scalar>;
  const int n = static_cast<int>(xi.size());
  const Scalar c = params.gamma / params.beta;
  const Scalar heat = std::exp(-effective_diffusivity(params) * xi.squaredNorm() * t);
  MatrixXc<Scalar> g(n + 1, n + 1);
  g(0, 0) = heat;
  for (int j = 0; j < n; ++j) {
    g(0, j + 1) = Complex(0, -c * xi(j)) * heat;
    g(j + 1, 0) = Complex(0, -c * xi(j)) * heat;
    for (int l = 0; l < n; ++l) g(j + 1, l + 1) = -c * c * xi(j) * xi(l) * heat;
  }
  return g;
}

/// R1(xi,t) = K(xi,t) - G(xi,t).
template <typename Scalar>
MatrixXc<Scalar> refined_remainder_mode(const KernelSplit<Scalar>& split, const VectorX<Scalar>& xi, Scalar t) {
  return split.diffusive_mode(xi, t) - heat_expansion_mode(xi, t, split.params);
}

}  // namespace chemo
