#include "chemo/kernel_decay.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace chemo {

namespace {

std::string block_name(Block b) { return b == Block::Conservative ? "L0" : "Lm"; }

std::string part_name(KernelPart part) {
  switch (part) {
    case KernelPart::Full: return "full";
    case KernelPart::Diffusive: return "K";
    case KernelPart::Hyperbolic: return "Kcal";
  }
  return "?";
}

// Norm of the requested block of w (given by its Fourier coefficients).
double block_norm(const Grid<double>& grid, const MatrixXc<double>& w_hat, Block block, NormKind p) {
  if (block == Block::Conservative) return grid_norm(grid, inverse_transform(grid, w_hat.col(0)), p);
  MatrixX<double> v(grid.size(), grid.dim());
  for (int j = 0; j < grid.dim(); ++j) v.col(j) = inverse_transform(grid, w_hat.col(j + 1));
  return grid_norm(grid, v.rowwise().norm(), p);
}

double full_norm(const Grid<double>& grid, const MatrixXc<double>& w_hat) {
  double sum = 0;
  for (int c = 0; c < w_hat.cols(); ++c) {
    const double n = spectral_l2_norm(grid, w_hat.col(c));
    sum += n * n;
  }
  return std::sqrt(sum);
}

template <typename ModeFn>
MatrixXc<double> apply_modes(const Grid<double>& grid, const MatrixXc<double>& w0_hat, ModeFn&& mode_matrix) {
  MatrixXc<double> out(w0_hat.rows(), w0_hat.cols());
  for (Eigen::Index m = 0; m < grid.size(); ++m) {
    const VectorX<double> xi = grid.odd_wavevector(m);
    out.row(m) = (mode_matrix(xi) * w0_hat.row(m).transpose()).transpose();
  }
  return out;
}

MatrixXc<double> initial_block_data(const Grid<double>& grid, const ScalarField<double>& probe, Block input) {
  if (!(probe.grid == grid)) throw std::invalid_argument("probe grid does not match");
  MatrixXc<double> w0 = MatrixXc<double>::Zero(grid.size(), grid.dim() + 1);
  w0.col(input == Block::Conservative ? 0 : 1) = forward(probe);
  return w0;
}

}  // namespace

ScalarField<double> gaussian_probe(const Grid<double>& grid, double width) {
  if (!(width > 0)) throw std::invalid_argument("probe width must be positive");
  ScalarField<double> f(grid);
  const double center = grid.length() / 2;
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    double r2 = 0;
    for (int d = 0; d < grid.dim(); ++d) {
      const double x = grid.coordinate(i, d) - center;
      r2 += x * x;
    }
    f.values(i) = std::exp(-r2 / (2 * width * width));
  }
  f.values /= norm(f, NormKind::L1);
  return f;
}

NormSeries measure_kernel_decay(const KernelSplit<double>& split, const Grid<double>& grid, Block input,
                                Block output, NormKind p, KernelPart part, const std::vector<double>& t_grid,
                                const ScalarField<double>& probe) {
  const MatrixXc<double> w0 = initial_block_data(grid, probe, input);
  NormSeries series;
  series.label = part_name(part) + "_" + block_name(input) + "_to_" + block_name(output) + "_" +
                 std::string(to_string(p));
  series.kind = p;
  for (double t : t_grid) {
    if (t < 0) throw std::invalid_argument("kernel times must be nonnegative");
    const MatrixXc<double> w = apply_modes(grid, w0, [&](const VectorX<double>& xi) { return split.mode(xi, t, part); });
    series.push(t, block_norm(grid, w, output, p));
  }
  return series;
}

RefinedRemainderSeries refined_remainder_decay(const KernelSplit<double>& split, const Grid<double>& grid,
                                               const std::vector<double>& t_grid, const ScalarField<double>& probe) {
  const MatrixXc<double> w0 = initial_block_data(grid, probe, Block::Conservative);
  RefinedRemainderSeries out;
  out.remainder_11.label = "R1_11_L2";
  out.remainder.label = "R1_L2";
  out.diffusive.label = "K_L2";
  out.ratio.label = "R1_over_K";
  for (double t : t_grid) {
    const MatrixXc<double> r =
        apply_modes(grid, w0, [&](const VectorX<double>& xi) { return refined_remainder_mode(split, xi, t); });
    const MatrixXc<double> k =
        apply_modes(grid, w0, [&](const VectorX<double>& xi) { return split.diffusive_mode(xi, t); });
    const double r_full = full_norm(grid, r);
    const double k_full = full_norm(grid, k);
    out.remainder_11.push(t, spectral_l2_norm(grid, r.col(0)));
    out.remainder.push(t, r_full);
    out.diffusive.push(t, k_full);
    out.ratio.push(t, k_full > 0 ? r_full / k_full : 0.0);
  }
  return out;
}

std::vector<double> log_spaced_times(double t_lo, double t_hi, int count) {
  if (!(t_lo > 0) || !(t_hi > t_lo) || count < 2) throw std::invalid_argument("invalid log-spaced time range");
  std::vector<double> out(count);
  const double step = std::log(t_hi / t_lo) / (count - 1);
  for (int i = 0; i < count; ++i) out[i] = t_lo * std::exp(step * i);
  out.back() = t_hi;
  return out;
}

}  // namespace chemo
