#pragma once

#include "chemo/kernels.hpp"
#include "chemo/series.hpp"

#include <vector>

namespace chemo {

/// Conservative (L0: u) or dissipative (L-: v) block of w = (u, v).
enum class Block { Conservative, Dissipative };

/// Centered Gaussian exp(-|x-c|^2 / (2 width^2)) rescaled to unit discrete L1 mass.
ScalarField<double> gaussian_probe(const Grid<double>& grid, double width);

/**
 * ||L_out Part(t) L_in^T probe||_{L^p} at each time of `t_grid`. The probe is
 * placed in u (conservative input) or in v_1 (dissipative input); the
 * dissipative output is measured through the pointwise magnitude |v|.
 */
NormSeries measure_kernel_decay(const KernelSplit<double>& split, const Grid<double>& grid, Block input,
                                Block output, NormKind p, KernelPart part, const std::vector<double>& t_grid,
                                const ScalarField<double>& probe);

struct RefinedRemainderSeries {
  NormSeries remainder_11;   // ||(R1)_11 probe||_L2
  NormSeries remainder;      // ||R1 (probe, 0)||_L2, all components
  NormSeries diffusive;      // ||K (probe, 0)||_L2, all components
  NormSeries ratio;          // remainder / diffusive
};

/// Remainder of the diffusive part after removing the heat-kernel block expansion.
RefinedRemainderSeries refined_remainder_decay(const KernelSplit<double>& split, const Grid<double>& grid,
                                               const std::vector<double>& t_grid, const ScalarField<double>& probe);

/// `count` log-spaced times in [t_lo, t_hi].
std::vector<double> log_spaced_times(double t_lo, double t_hi, int count);

}  // namespace chemo
