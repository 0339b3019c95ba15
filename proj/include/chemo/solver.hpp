#pragma once

#include "chemo/kernels.hpp"
#include "chemo/series.hpp"

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace chemo {

enum class Regime { ZeroState, ConstantState, Pks };

enum class InitShape { Zero, Gaussian, Mode };

/// amplitude * exp(-|x-c|^2 / (2 width^2)) or amplitude * cos(2 pi k.x / L).
struct InitProfile {
  InitShape shape = InitShape::Zero;
  double amplitude = 0;
  double width = 1;
  std::vector<double> center;  // empty: domain center
  std::vector<int> mode;       // integer wavenumbers per axis

  ScalarField<double> evaluate(const Grid<double>& grid) const;
};

/// Initial profiles for u, the first flux component v_1, and phi.
struct InitSpec {
  InitProfile u;
  InitProfile v;
  InitProfile phi;
};

struct SolverConfig {
  Grid<double> grid;
  ModelParams<double> params;
  SourceSpec<double> sources = SourceSpec<double>::default_coupling();
  Regime regime = Regime::ZeroState;
  double u_bar = 0;
  double dt = 0;       // 0: default_time_step
  double t_end = 1;
  int record_every = 1;
  InitSpec init;
  double sobolev_s = 1;
  int derivative_orders = 1;      // D^k norms recorded for k = 1..derivative_orders
  bool verify_propagator = false; // cross-check the linear propagator against expm
  int snapshot_every = 0;         // keep full states every that many records (0: none)

  void validate() const;
  double time_step() const;
  long step_count() const;
  StationaryState<double> background() const;
};

/// min(0.5/beta, 0.1, 0.25 h / gamma).
double default_time_step(const Grid<double>& grid, const ModelParams<double>& params);

class BlowUpError : public std::runtime_error {
 public:
  BlowUpError(double time, const std::string& what)
      : std::runtime_error("blow-up or instability at t=" + std::to_string(time) + ": " + what), time_(time) {}
  double time() const { return time_; }

 private:
  double time_;
};

class ContractionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Snapshot {
  double time = 0;
  ScalarField<double> u;
  VectorField<double> v;
  ScalarField<double> phi;
};

/// Recorded norms, one column per label, one row per recorded time.
class Trajectory {
 public:
  std::vector<double> times;
  std::vector<std::string> labels;
  std::vector<std::vector<double>> columns;
  std::vector<Snapshot> snapshots;

  void record(double t, const std::vector<std::pair<std::string, double>>& values);
  bool has(const std::string& label) const;
  const std::vector<double>& column(const std::string& label) const;
  NormSeries series(const std::string& label) const;
  std::size_t size() const { return times.size(); }
};

SpectralState<double> initial_state(const SolverConfig& config);

/**
 * Strang-split integrator of the hyperbolic-parabolic system in C-D variables.
 * Linear parts (damped wave block and heat semigroup with decay b) are applied
 * exactly per mode over half steps; the coupling sources run through one Heun
 * (RK2) step in physical space with spectral gradients.
 */
class HyperbolicStepper {
 public:
  explicit HyperbolicStepper(const SolverConfig& config);
  void step(SpectralState<double>& state, double time) const;
  double dt() const { return dt_; }

 private:
  struct SourceRates {
    MatrixXc<double> w;
    VectorXc<double> phi;
  };
  SourceRates source_rates(const MatrixXc<double>& w_hat, const VectorXc<double>& phi_hat,
                           const ScalarField<double>& u) const;

  SolverConfig config_;
  double dt_;
  HyperbolicPropagator<double> half_wave_;
  Eigen::VectorXcd half_heat_;
};

/// Splitting integrator of the parabolic (PKS) limit system.
class ParabolicStepper {
 public:
  explicit ParabolicStepper(const SolverConfig& config);
  void step(SpectralState<double>& state, double time) const;
  double dt() const { return dt_; }

 private:
  struct SourceRates {
    VectorXc<double> u;
    VectorXc<double> phi;
  };
  SourceRates source_rates(const VectorXc<double>& u_hat, const VectorXc<double>& phi_hat) const;

  SolverConfig config_;
  double dt_;
  Eigen::VectorXcd half_u_;
  Eigen::VectorXcd half_heat_;
};

/// One splitting step of length dt for the hyperbolic regimes.
SpectralState<double> step(const SpectralState<double>& state, double dt, const SolverConfig& config);

/// Norm columns of a spectral state (hyperbolic layout when `with_flux`).
std::vector<std::pair<std::string, double>> state_norms(const SpectralState<double>& state, const SolverConfig& config,
                                                         bool with_flux, const std::string& prefix = "");

Trajectory run(const SolverConfig& config);
Trajectory run_pks(const SolverConfig& config);

struct Comparison {
  Trajectory hyperbolic;
  Trajectory parabolic;
  NormSeries diff_u;
  NormSeries diff_phi;
};

/// Both systems from identical (u, phi) data in lockstep; v starts from the config's profile.
Comparison run_comparison(const SolverConfig& config);

struct OracleResult {
  SpectralState<double> state;   // last Picard iterate at t_end
  std::vector<double> deltas;    // max-over-nodes L2 change between consecutive iterates
};

/**
 * Picard iteration of the Duhamel integral equations for (w, phi) on
 * `quadrature_nodes` uniform nodes of [0, t_end] with trapezoid weights.
 * Iterate 0 is the free linear flow. Throws ContractionError when a delta
 * fails to decrease while still above round-off.
 */
OracleResult duhamel_oracle(const SolverConfig& config, int n_picard, int quadrature_nodes);

/// Relative L2 distance between two states over (u, v, phi).
double relative_state_gap(const SpectralState<double>& a, const SpectralState<double>& reference);

}  // namespace chemo
