#pragma once

#include "chemo/calculus.hpp"

#include <Eigen/Eigenvalues>

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace chemo {

/// Characteristic speed gamma, damping beta, production a and degradation b.
template <typename Scalar>
struct ModelParams {
  Scalar gamma = 1;
  Scalar beta = 1;
  Scalar a = 1;
  Scalar b = 1;

  /// `allow_decoupled` admits a = 0, the linear test configuration of the solver.
  void validate(bool allow_decoupled = false) const {
    auto positive = [](Scalar x, const char* name) {
      if (!(x > 0) || !std::isfinite(static_cast<double>(x)))
        throw std::invalid_argument(std::string(name) + " must be strictly positive");
    };
    positive(gamma, "gamma");
    positive(beta, "beta");
    if (!(allow_decoupled && a == 0)) positive(a, "a");
    positive(b, "b");
  }
};

// Closed-form nonlinearities. Each entry of the catalog vanishes at the origin
// with the growth constant returned by the matching *_bound_constant().
enum class DampingKind { Zero, Quad };            // bbar(phi, grad phi)
enum class SensitivityKind { Zero, Grad, Sat };   // h(phi, grad phi)
enum class ResponseKind { Zero, Linear };         // g(u)
enum class ProductionKind { Zero, Quad };         // fbar(u, phi)

template <typename Scalar>
struct SourceSpec {
  DampingKind bbar = DampingKind::Zero;
  Scalar bbar_c3 = 0;
  SensitivityKind h = SensitivityKind::Grad;
  Scalar chi = 1;
  ResponseKind g = ResponseKind::Linear;
  ProductionKind fbar = ProductionKind::Zero;
  Scalar fbar_c1 = 0;
  Scalar fbar_c2 = 0;

  /// The minimal coupled system: bbar = 0, h = chi grad phi, g(u) = u, fbar = 0.
  static SourceSpec default_coupling(Scalar chi_value = 1) {
    SourceSpec spec;
    spec.chi = chi_value;
    return spec;
  }

  static SourceSpec zero() {
    SourceSpec spec;
    spec.h = SensitivityKind::Zero;
    spec.g = ResponseKind::Zero;
    return spec;
  }

  bool couples_flux() const { return h != SensitivityKind::Zero && g != ResponseKind::Zero; }

  // Scalar profiles, used both by the field evaluation and the smallness checks.
  // `w` stands for one component of grad phi (or its magnitude).
  Scalar bbar_value(Scalar phi, Scalar /*w*/) const {
    return bbar == DampingKind::Quad ? bbar_c3 * phi : Scalar(0);
  }
  /// h = sensitivity_factor(phi) * grad phi
  Scalar sensitivity_factor(Scalar phi) const {
    switch (h) {
      case SensitivityKind::Zero: return 0;
      case SensitivityKind::Grad: return chi;
      case SensitivityKind::Sat: return chi / (Scalar(1) + phi * phi);
    }
    return 0;
  }
  Scalar g_value(Scalar u) const { return g == ResponseKind::Linear ? u : Scalar(0); }
  Scalar fbar_value(Scalar u, Scalar phi) const {
    return fbar == ProductionKind::Quad ? fbar_c1 * u * u + fbar_c2 * phi * phi : Scalar(0);
  }

  // |bbar| <= B_K (|z|+|w|), |h| <= H_K (|z|+|w|), |g| <= G_K |z|, |fbar| <= F_K (z^2+w^2)
  Scalar bbar_bound_constant() const { return std::abs(bbar_c3); }
  Scalar h_bound_constant() const { return h == SensitivityKind::Zero ? Scalar(0) : std::abs(chi); }
  Scalar g_bound_constant() const { return g == ResponseKind::Linear ? Scalar(1) : Scalar(0); }
  Scalar fbar_bound_constant() const { return std::max(std::abs(fbar_c1), std::abs(fbar_c2)); }
};

/// Symmetric flux matrices A_j and source matrix B = diag(0, -beta I).
template <typename Scalar>
struct SystemMatrices {
  std::vector<MatrixX<Scalar>> A;
  MatrixX<Scalar> B;

  int dim() const { return static_cast<int>(A.size()); }

  /// Sum_j A_j xi_j.
  MatrixX<Scalar> flux_symbol(const VectorX<Scalar>& xi) const {
    MatrixX<Scalar> out = MatrixX<Scalar>::Zero(B.rows(), B.cols());
    for (int j = 0; j < dim(); ++j) out += xi(j) * A[j];
    return out;
  }
};

template <typename Scalar>
struct StationaryState {
  Scalar u_bar = 0;
  Scalar phi_bar = 0;
};

template <typename Scalar>
StationaryState<Scalar> stationary_state(Scalar u_bar, const ModelParams<Scalar>& params) {
  if (u_bar < 0) throw std::invalid_argument("u_bar must be nonnegative");
  return {u_bar, params.a * u_bar / params.b};
}

/// (u, v) -> (u, v / gamma).
template <typename Scalar>
std::pair<ScalarField<Scalar>, VectorField<Scalar>> cd_transform(const ScalarField<Scalar>& u,
                                                                  const VectorField<Scalar>& v, Scalar gamma) {
  if (!(gamma > 0)) throw std::invalid_argument("gamma must be strictly positive");
  VectorField<Scalar> w2 = v;
  w2.values /= gamma;
  return {u, std::move(w2)};
}

template <typename Scalar>
std::pair<ScalarField<Scalar>, VectorField<Scalar>> cd_inverse(const ScalarField<Scalar>& w1,
                                                               const VectorField<Scalar>& w2, Scalar gamma) {
  if (!(gamma > 0)) throw std::invalid_argument("gamma must be strictly positive");
  VectorField<Scalar> v = w2;
  v.values *= gamma;
  return {w1, std::move(v)};
}

template <typename Scalar>
SystemMatrices<Scalar> build_matrices(const ModelParams<Scalar>& params, int dim) {
  if (dim < 1 || dim > 3) throw std::invalid_argument("dimension must be 1, 2 or 3");
  SystemMatrices<Scalar> m;
  const int size = dim + 1;
  for (int j = 0; j < dim; ++j) {
    MatrixX<Scalar> a = MatrixX<Scalar>::Zero(size, size);
    a(0, j + 1) = params.gamma;
    a(j + 1, 0) = params.gamma;
    m.A.push_back(std::move(a));
  }
  m.B = MatrixX<Scalar>::Zero(size, size);
  m.B.bottomRightCorner(dim, dim).diagonal().setConstant(-params.beta);
  return m;
}

template <typename Scalar>
struct SkResult {
  bool satisfied = true;
  std::optional<VectorX<Scalar>> witness_xi;
  std::optional<VectorX<Scalar>> witness_eigenvector;
};

/**
 * Shizuta-Kawashima check: no eigenvector of sum_j A_j xi_j lies in ker B.
 *
 * Eigenvalues are grouped into numerically degenerate clusters; a cluster
 * violates the condition when B restricted to its eigenspace has a (relative)
 * null direction, detected through the smallest singular value of B V.
 */
template <typename Scalar>
SkResult<Scalar> sk_check(const SystemMatrices<Scalar>& m, const std::vector<VectorX<Scalar>>& xi_samples,
                          Scalar tol = Scalar(1e-10)) {
  SkResult<Scalar> result;
  for (const auto& xi : xi_samples) {
    if (xi.size() != m.dim()) throw std::invalid_argument("xi sample has wrong dimension");
    if (xi.norm() == 0) throw std::invalid_argument("sk_check requires nonzero xi");
    const MatrixX<Scalar> symbol = m.flux_symbol(xi);
    Eigen::SelfAdjointEigenSolver<MatrixX<Scalar>> eig(symbol);
    const VectorX<Scalar>& lambda = eig.eigenvalues();
    const MatrixX<Scalar>& vectors = eig.eigenvectors();
    const Scalar scale = std::max(Scalar(1), lambda.cwiseAbs().maxCoeff());
    const Scalar b_scale = std::max(Scalar(1), m.B.norm());
    Eigen::Index start = 0;
    while (start < lambda.size()) {
      Eigen::Index end = start + 1;
      while (end < lambda.size() && std::abs(lambda(end) - lambda(start)) <= Scalar(1e-9) * scale) ++end;
      const MatrixX<Scalar> basis = vectors.middleCols(start, end - start);
      Eigen::JacobiSVD<MatrixX<Scalar>> svd(m.B * basis, Eigen::ComputeFullV);
      const VectorX<Scalar>& sv = svd.singularValues();
      const Eigen::Index cols = basis.cols();
      const Scalar smallest = sv.size() < cols ? Scalar(0) : sv(cols - 1);
      if (smallest < tol * b_scale) {
        result.satisfied = false;
        result.witness_xi = xi;
        result.witness_eigenvector = basis * svd.matrixV().col(cols - 1);
        return result;
      }
      start = end;
    }
  }
  return result;
}

/// Nonlinear and coupling right-hand sides handled outside the exact linear propagators.
template <typename Scalar>
struct SourceTerms {
  VectorField<Scalar> rhs_v;
  ScalarField<Scalar> rhs_phi;
};

/**
 * Pointwise sources for the perturbation (u, v, phi) around (u_bar, 0, phi_bar):
 *   rhs_v   = -bbar(phi_bar + phi, grad phi) v + h(phi_bar + phi, grad phi) g(u_bar + u)
 *   rhs_phi = a u + fbar(u, phi)
 * The zero state corresponds to u_bar = phi_bar = 0. Throws std::runtime_error on
 * non-finite output.
 */
template <typename Scalar>
SourceTerms<Scalar> evaluate_sources(const ScalarField<Scalar>& u, const VectorField<Scalar>& v,
                                     const ScalarField<Scalar>& phi, const VectorField<Scalar>& grad_phi,
                                     const SourceSpec<Scalar>& spec, const ModelParams<Scalar>& params,
                                     const StationaryState<Scalar>& background = {}) {
  const Grid<Scalar>& grid = u.grid;
  if (!(v.grid == grid) || !(phi.grid == grid) || !(grad_phi.grid == grid))
    throw std::invalid_argument("source evaluation requires fields on one grid");
  SourceTerms<Scalar> out{VectorField<Scalar>(grid), ScalarField<Scalar>(grid)};
  const bool damping = spec.bbar != DampingKind::Zero;
  const bool coupling = spec.couples_flux();
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    const Scalar phi_total = background.phi_bar + phi.values(i);
    Scalar coupling_factor = 0;
    if (coupling) coupling_factor = spec.sensitivity_factor(phi_total) * spec.g_value(background.u_bar + u.values(i));
    for (int j = 0; j < grid.dim(); ++j) {
      Scalar value = coupling_factor * grad_phi.values(i, j);
      if (damping) value -= spec.bbar_value(phi_total, grad_phi.values(i, j)) * v.values(i, j);
      out.rhs_v.values(i, j) = value;
    }
    out.rhs_phi.values(i) = params.a * u.values(i) + spec.fbar_value(u.values(i), phi.values(i));
  }
  if (!out.rhs_v.all_finite() || !out.rhs_phi.all_finite())
    throw std::runtime_error("non-finite source values: blow-up or instability");
  return out;
}

}  // namespace chemo
