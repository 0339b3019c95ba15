#pragma once

#include "chemo/series.hpp"

#include <functional>
#include <map>
#include <string>
#include <vector>

namespace chemo {

struct FitWindow {
  double lo = 10;
  double hi = 200;
};

enum class FitKind { Power, Exp };

/// Least-squares fit of log v against log t (Power) or t (Exp); `exponent` is the slope.
struct DecayFit {
  double exponent = 0;
  double intercept = 0;
  double r_squared = 0;
  FitWindow window;
  std::size_t samples = 0;

  /// Preasymptotic contamination shows up as a poor log-linear fit.
  bool reliable() const { return r_squared >= 0.98; }
};

DecayFit fit_decay(const NormSeries& series, FitWindow window, FitKind kind = FitKind::Power);

/// sup_s max{1, s^delta} ||g(s)||_{L2} over the recorded times; needs an L2 series.
double functional_M(const NormSeries& series, double delta);
/// The L-infinity twin of functional_M.
double functional_N(const NormSeries& series, double delta);
/// Running value of the weighted supremum at every recorded time (any norm kind).
NormSeries running_functional(const NormSeries& series, double delta);

/// int_0^t min{1,(t-s)^-gamma} min{1,s^-delta} ds by adaptive Gauss-Kronrod quadrature.
double convolution_integral(double gamma_exp, double delta_exp, double t);

/// Right-hand side (without constant) of the convolution lemma for the case selected by (gamma, delta).
double convolution_lemma_bound(double gamma_exp, double delta_exp, double t);
std::string convolution_lemma_case(double gamma_exp, double delta_exp);

struct ConvolutionCheck {
  double max_ratio = 0;
  std::string case_label;
  std::vector<double> ratios;
};

ConvolutionCheck convolution_bound_check(double gamma_exp, double delta_exp, const std::vector<double>& t_grid);

/// Inserts factor-1 geometrically spaced points between consecutive entries.
std::vector<double> refine_time_grid(const std::vector<double>& t_grid, int factor);

/// One row of the decay-rate table: ||quantity(t)|| ~ t^{-rate}.
struct ExpectedRate {
  std::string quantity;
  double rate = 0;
};

/// delta_k for the conservative variable (and D^{k+1} phi); delta_0 = n/4.
double conservative_rate(int n, int k);
/// nu_k for the dissipative variable; nu_0 = min{n/2, n/4 + 1/2}.
double dissipative_rate(int n, int k);
/// Common rate min{n/4, n/8 + 1} of the constant-state perturbation.
double constant_state_rate(int n);
/// Rate min{n/4 + 1/2, n/2} of the hyperbolic-parabolic difference.
double comparison_rate(int n);

/**
 * Zero-state decay table for dimension n with derivative orders up to
 * `max_order`. Quantity names match the trajectory columns (u_L2, v_D1_L2, ...).
 */
std::vector<ExpectedRate> expected_rates(int n, int max_order);

/// Tolerance on the fitted exponent: 0.15 for L-infinity quantities, 0.1 otherwise.
double default_tolerance(const std::string& quantity);

struct ReportEntry {
  std::string quantity;
  double expected_exponent = 0;  // -rate
  double fitted_exponent = 0;
  double gap = 0;                // |fitted - expected|
  double tolerance = 0;
  double r_squared = 0;
  FitWindow window;
  bool pass = false;
  std::string note;
};

struct DecayReport {
  std::vector<ReportEntry> entries;
  bool all_pass() const;
};

/**
 * Compares fits against the table. A quantity passes when it decays at least
 * as fast as the expected rate within tolerance (fitted <= expected + tol);
 * strictly faster decay and unreliable fits are noted.
 */
DecayReport assemble_report(const std::map<std::string, DecayFit>& fits, const std::vector<ExpectedRate>& table,
                            const std::function<double(const std::string&)>& tolerance = default_tolerance);

}  // namespace chemo
