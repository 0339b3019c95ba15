#include "chemo/solver.hpp"

#include "chemo/calculus.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace chemo {

namespace {

using Complex = std::complex<double>;

NormKind kind_from_label(const std::string& label) {
  auto ends_with = [&](const std::string& suffix) {
    return label.size() >= suffix.size() && label.compare(label.size() - suffix.size(), suffix.size(), suffix) == 0;
  };
  if (ends_with("_Linf")) return NormKind::Linf;
  if (ends_with("_L1")) return NormKind::L1;
  return NormKind::L2;
}

// ||D^k f||_{L2} from Fourier coefficients, with |xi|^{2k} as the symbol.
double derivative_norm(const Grid<double>& grid, const VectorXc<double>& f_hat, int k) {
  double sum = 0;
  for (Eigen::Index m = 0; m < grid.size(); ++m) sum += std::pow(grid.wavenumber_squared(m), k) * std::norm(f_hat(m));
  const double n = static_cast<double>(grid.size());
  return std::sqrt(grid.volume() * sum / (n * n));
}

VectorX<double> physical(const Grid<double>& grid, const VectorXc<double>& coeffs) {
  return inverse_transform(grid, coeffs);
}

MatrixX<double> physical_flux(const Grid<double>& grid, const MatrixXc<double>& w_hat) {
  MatrixX<double> v(grid.size(), grid.dim());
  for (int j = 0; j < grid.dim(); ++j) v.col(j) = physical(grid, w_hat.col(j + 1));
  return v;
}

MatrixX<double> physical_gradient(const Grid<double>& grid, const VectorXc<double>& f_hat) {
  MatrixX<double> g(grid.size(), grid.dim());
  for (int j = 0; j < grid.dim(); ++j) g.col(j) = physical(grid, spectral_partial(grid, f_hat, j));
  return g;
}

Eigen::VectorXcd complex_multipliers(const VectorX<double>& real) { return real.cast<Complex>(); }

void check_finite(const SpectralState<double>& state, double time) {
  if (!state.all_finite()) throw BlowUpError(time, "non-finite Fourier coefficients");
}

template <typename Fn>
auto guarded(double time, Fn&& fn) {
  try {
    return fn();
  } catch (const std::runtime_error& e) {
    throw BlowUpError(time, e.what());
  }
}

Snapshot make_snapshot(const SpectralState<double>& state, double time) {
  const Grid<double>& g = state.grid;
  Snapshot s;
  s.time = time;
  s.u = ScalarField<double>(g, physical(g, state.w_hat.col(0)));
  s.v = VectorField<double>(g);
  s.v.values = physical_flux(g, state.w_hat);
  s.phi = ScalarField<double>(g, physical(g, state.phi_hat));
  return s;
}

void record_state(Trajectory& traj, const SpectralState<double>& state, const SolverConfig& config, bool with_flux,
                  double time) {
  traj.record(time, state_norms(state, config, with_flux));
  if (config.snapshot_every > 0 && (traj.size() - 1) % static_cast<std::size_t>(config.snapshot_every) == 0)
    traj.snapshots.push_back(make_snapshot(state, time));
}

}  // namespace

ScalarField<double> InitProfile::evaluate(const Grid<double>& grid) const {
  ScalarField<double> f(grid);
  switch (shape) {
    case InitShape::Zero:
      return f;
    case InitShape::Gaussian: {
      if (!(width > 0)) throw std::invalid_argument("Gaussian width must be positive");
      if (!center.empty() && static_cast<int>(center.size()) != grid.dim())
        throw std::invalid_argument("Gaussian center must have one entry per dimension");
      for (Eigen::Index i = 0; i < grid.size(); ++i) {
        double r2 = 0;
        for (int d = 0; d < grid.dim(); ++d) {
          const double c = center.empty() ? grid.length() / 2 : center[d];
          const double x = grid.coordinate(i, d) - c;
          r2 += x * x;
        }
        f.values(i) = amplitude * std::exp(-r2 / (2 * width * width));
      }
      return f;
    }
    case InitShape::Mode: {
      if (static_cast<int>(mode.size()) != grid.dim())
        throw std::invalid_argument("mode wavenumber must have one entry per dimension");
      const double scale = 2 * std::numbers::pi / grid.length();
      for (Eigen::Index i = 0; i < grid.size(); ++i) {
        double phase = 0;
        for (int d = 0; d < grid.dim(); ++d) phase += mode[d] * grid.coordinate(i, d);
        f.values(i) = amplitude * std::cos(scale * phase);
      }
      return f;
    }
  }
  return f;
}

double default_time_step(const Grid<double>& grid, const ModelParams<double>& params) {
  return std::min({0.5 / params.beta, 0.1, 0.25 * grid.spacing() / params.gamma});
}

void SolverConfig::validate() const {
  if (grid.size() == 0) throw std::invalid_argument("solver config has no grid");
  params.validate(true);
  if (dt < 0 || !std::isfinite(dt)) throw std::invalid_argument("dt must be positive (0 selects the default)");
  if (!(t_end > 0) || !std::isfinite(t_end)) throw std::invalid_argument("t_end must be positive");
  if (dt > 0 && t_end < dt) throw std::invalid_argument("t_end must be at least dt");
  if (record_every < 1) throw std::invalid_argument("record_every must be at least 1");
  if (snapshot_every < 0) throw std::invalid_argument("snapshot_every must be nonnegative");
  if (sobolev_s < 0) throw std::invalid_argument("Sobolev index must be nonnegative");
  if (derivative_orders < 0 || derivative_orders > 4) throw std::invalid_argument("derivative_orders must be in [0, 4]");
  if (regime == Regime::ConstantState) {
    if (u_bar < 0) throw std::invalid_argument("u_bar must be nonnegative");
    if (sources.fbar != ProductionKind::Zero)
      throw std::invalid_argument("constant-state regime requires fbar = ZERO");
  }
  for (const InitProfile* p : {&init.u, &init.v, &init.phi}) {
    if (p->shape == InitShape::Gaussian && !(p->width > 0)) throw std::invalid_argument("Gaussian width must be positive");
    if (!std::isfinite(p->amplitude)) throw std::invalid_argument("initial amplitude must be finite");
    if (p->shape == InitShape::Mode && static_cast<int>(p->mode.size()) != grid.dim())
      throw std::invalid_argument("mode wavenumber must have one entry per dimension");
  }
}

long SolverConfig::step_count() const {
  const double requested = dt > 0 ? dt : default_time_step(grid, params);
  return std::max(1L, static_cast<long>(std::ceil(t_end / requested - 1e-9)));
}

double SolverConfig::time_step() const { return t_end / static_cast<double>(step_count()); }

StationaryState<double> SolverConfig::background() const {
  if (regime == Regime::ConstantState) return stationary_state(u_bar, params);
  return {};
}

void Trajectory::record(double t, const std::vector<std::pair<std::string, double>>& values) {
  if (!times.empty() && !(t > times.back())) throw std::invalid_argument("trajectory times must be strictly increasing");
  if (labels.empty()) {
    for (const auto& [label, value] : values) labels.push_back(label);
    columns.assign(labels.size(), {});
  }
  if (values.size() != labels.size()) throw std::invalid_argument("trajectory record has the wrong number of columns");
  for (std::size_t c = 0; c < values.size(); ++c) {
    if (values[c].first != labels[c]) throw std::invalid_argument("trajectory record column mismatch: " + values[c].first);
    if (!std::isfinite(values[c].second)) throw BlowUpError(t, "non-finite norm " + values[c].first);
    columns[c].push_back(values[c].second);
  }
  times.push_back(t);
}

bool Trajectory::has(const std::string& label) const {
  return std::find(labels.begin(), labels.end(), label) != labels.end();
}

const std::vector<double>& Trajectory::column(const std::string& label) const {
  const auto it = std::find(labels.begin(), labels.end(), label);
  if (it == labels.end()) throw std::out_of_range("no trajectory column " + label);
  return columns[static_cast<std::size_t>(it - labels.begin())];
}

NormSeries Trajectory::series(const std::string& label) const {
  const std::vector<double>& col = column(label);
  NormSeries s;
  s.label = label;
  s.kind = kind_from_label(label);
  for (std::size_t i = 0; i < times.size(); ++i) s.push(times[i], col[i]);
  return s;
}

SpectralState<double> initial_state(const SolverConfig& config) {
  const Grid<double>& g = config.grid;
  SpectralState<double> state(g);
  state.w_hat.col(0) = forward(config.init.u.evaluate(g));
  state.w_hat.col(1) = forward(config.init.v.evaluate(g));
  state.phi_hat = forward(config.init.phi.evaluate(g));
  return state;
}

std::vector<std::pair<std::string, double>> state_norms(const SpectralState<double>& state, const SolverConfig& config,
                                                         bool with_flux, const std::string& prefix) {
  const Grid<double>& g = state.grid;
  const int n = g.dim();
  const double s = config.sobolev_s;
  std::vector<std::pair<std::string, double>> out;
  auto add = [&](const std::string& label, double value) { out.emplace_back(prefix + label, value); };

  const VectorXc<double> u_hat = state.w_hat.col(0);
  const VectorX<double> u = physical(g, u_hat);
  add("u_L1", grid_norm(g, u, NormKind::L1));
  add("u_L2", grid_norm(g, u, NormKind::L2));
  add("u_Linf", grid_norm(g, u, NormKind::Linf));
  add("u_Hs", sobolev_norm_spectral(g, u_hat, s));
  for (int k = 1; k <= config.derivative_orders; ++k) add("u_D" + std::to_string(k) + "_L2", derivative_norm(g, u_hat, k));

  if (with_flux) {
    const MatrixX<double> v = physical_flux(g, state.w_hat);
    for (int j = 0; j < n; ++j) add("v" + std::to_string(j + 1) + "_L2", grid_norm(g, v.col(j), NormKind::L2));
    const VectorX<double> mag = v.rowwise().norm();
    add("v_agg_L1", grid_norm(g, mag, NormKind::L1));
    add("v_agg_L2", grid_norm(g, mag, NormKind::L2));
    add("v_agg_Linf", grid_norm(g, mag, NormKind::Linf));
    double hs = 0;
    for (int j = 0; j < n; ++j) hs += std::pow(sobolev_norm_spectral(g, VectorXc<double>(state.w_hat.col(j + 1)), s), 2);
    add("v_Hs", std::sqrt(hs));
    for (int k = 1; k <= config.derivative_orders; ++k) {
      double sum = 0;
      for (int j = 0; j < n; ++j) sum += std::pow(derivative_norm(g, state.w_hat.col(j + 1), k), 2);
      add("v_D" + std::to_string(k) + "_L2", std::sqrt(sum));
    }
  }

  const VectorX<double> phi = physical(g, state.phi_hat);
  add("phi_L1", grid_norm(g, phi, NormKind::L1));
  add("phi_L2", grid_norm(g, phi, NormKind::L2));
  add("phi_Linf", grid_norm(g, phi, NormKind::Linf));
  add("phi_Hs", sobolev_norm_spectral(g, state.phi_hat, s));
  for (int k = 1; k <= config.derivative_orders; ++k)
    add("phi_D" + std::to_string(k + 1) + "_L2", derivative_norm(g, state.phi_hat, k + 1));
  const VectorX<double> gphi = physical_gradient(g, state.phi_hat).rowwise().norm();
  add("gphi_L2", grid_norm(g, gphi, NormKind::L2));
  add("gphi_Linf", grid_norm(g, gphi, NormKind::Linf));
  add("mass_u", u_hat(0).real() * g.cell_volume());
  return out;
}

HyperbolicStepper::HyperbolicStepper(const SolverConfig& config)
    : config_(config),
      dt_(config.time_step()),
      half_wave_(config.grid, dt_ / 2, config.params),
      half_heat_(complex_multipliers(heat_multipliers(config.grid, dt_ / 2, config.params.b, 1.0))) {
  config_.validate();
  if (config_.regime == Regime::Pks) throw std::invalid_argument("HyperbolicStepper does not integrate the PKS regime");
  if (config_.verify_propagator) {
    MatrixXc<double> probe = MatrixXc<double>::Ones(config_.grid.size(), config_.grid.dim() + 1);
    (void)propagate_hyperbolic(config_.grid, probe, dt_ / 2, config_.params, true);
  }
}

HyperbolicStepper::SourceRates HyperbolicStepper::source_rates(const MatrixXc<double>& w_hat,
                                                               const VectorXc<double>& phi_hat,
                                                               const ScalarField<double>& u) const {
  const Grid<double>& g = config_.grid;
  const SourceSpec<double>& spec = config_.sources;
  const bool flux_sources = spec.couples_flux() || spec.bbar != DampingKind::Zero;

  ScalarField<double> phi(g, physical(g, phi_hat));
  VectorField<double> grad_phi(g);
  VectorField<double> v(g);
  if (flux_sources) grad_phi.values = physical_gradient(g, phi_hat);
  if (spec.bbar != DampingKind::Zero) v.values = physical_flux(g, w_hat);

  const SourceTerms<double> terms = evaluate_sources(u, v, phi, grad_phi, spec, config_.params, config_.background());
  SourceRates rates{MatrixXc<double>::Zero(g.size(), g.dim() + 1), forward(terms.rhs_phi)};
  if (flux_sources)
    for (int j = 0; j < g.dim(); ++j) rates.w.col(j + 1) = forward_transform(g, terms.rhs_v.values.col(j));
  return rates;
}

void HyperbolicStepper::step(SpectralState<double>& state, double time) const {
  if (!(state.grid == config_.grid)) throw std::invalid_argument("state grid does not match solver grid");
  half_wave_.apply(state.w_hat);
  state.phi_hat.array() *= half_heat_.array();

  // u is untouched by the sources, so it stays frozen through the Heun stages.
  const ScalarField<double> u(config_.grid, physical(config_.grid, state.w_hat.col(0)));
  guarded(time, [&] {
    const SourceRates k1 = source_rates(state.w_hat, state.phi_hat, u);
    const MatrixXc<double> w1 = state.w_hat + dt_ * k1.w;
    const VectorXc<double> phi1 = state.phi_hat + dt_ * k1.phi;
    const SourceRates k2 = source_rates(w1, phi1, u);
    state.w_hat += (dt_ / 2) * (k1.w + k2.w);
    state.phi_hat += (dt_ / 2) * (k1.phi + k2.phi);
    return 0;
  });

  half_wave_.apply(state.w_hat);
  state.phi_hat.array() *= half_heat_.array();
  check_finite(state, time + dt_);
}

ParabolicStepper::ParabolicStepper(const SolverConfig& config)
    : config_(config),
      dt_(config.time_step()),
      half_u_(complex_multipliers(heat_multipliers(config.grid, dt_ / 2, 0.0, effective_diffusivity(config.params)))),
      half_heat_(complex_multipliers(heat_multipliers(config.grid, dt_ / 2, config.params.b, 1.0))) {
  config_.validate();
}

ParabolicStepper::SourceRates ParabolicStepper::source_rates(const VectorXc<double>& u_hat,
                                                             const VectorXc<double>& phi_hat) const {
  const Grid<double>& g = config_.grid;
  const SourceSpec<double>& spec = config_.sources;
  const ScalarField<double> u(g, physical(g, u_hat));
  const ScalarField<double> phi(g, physical(g, phi_hat));
  VectorField<double> grad_phi(g);
  const VectorField<double> v(g);
  if (spec.couples_flux()) grad_phi.values = physical_gradient(g, phi_hat);

  // With v = 0 the flux source reduces to the transport field h g.
  const SourceTerms<double> terms = evaluate_sources(u, v, phi, grad_phi, spec, config_.params);
  SourceRates rates{VectorXc<double>::Zero(g.size()), forward(terms.rhs_phi)};
  if (spec.couples_flux()) {
    MatrixXc<double> flux(g.size(), g.dim());
    for (int j = 0; j < g.dim(); ++j) flux.col(j) = forward_transform(g, terms.rhs_v.values.col(j));
    rates.u = -(config_.params.gamma / config_.params.beta) * spectral_divergence(g, flux);
  }
  return rates;
}

void ParabolicStepper::step(SpectralState<double>& state, double time) const {
  if (!(state.grid == config_.grid)) throw std::invalid_argument("state grid does not match solver grid");
  state.w_hat.col(0).array() *= half_u_.array();
  state.phi_hat.array() *= half_heat_.array();

  guarded(time, [&] {
    const VectorXc<double> u0 = state.w_hat.col(0);
    const SourceRates k1 = source_rates(u0, state.phi_hat);
    const SourceRates k2 = source_rates(u0 + dt_ * k1.u, state.phi_hat + dt_ * k1.phi);
    state.w_hat.col(0) += (dt_ / 2) * (k1.u + k2.u);
    state.phi_hat += (dt_ / 2) * (k1.phi + k2.phi);
    return 0;
  });

  state.w_hat.col(0).array() *= half_u_.array();
  state.phi_hat.array() *= half_heat_.array();
  check_finite(state, time + dt_);
}

SpectralState<double> step(const SpectralState<double>& state, double dt, const SolverConfig& config) {
  if (!(dt > 0)) throw std::invalid_argument("dt must be positive");
  SolverConfig single = config;
  single.dt = dt;
  single.t_end = dt;
  SpectralState<double> out = state;
  HyperbolicStepper(single).step(out, 0.0);
  return out;
}

Trajectory run(const SolverConfig& config) {
  if (config.regime == Regime::Pks) return run_pks(config);
  HyperbolicStepper stepper(config);
  SpectralState<double> state = initial_state(config);
  const long steps = config.step_count();
  Trajectory traj;
  record_state(traj, state, config, true, 0.0);
  for (long k = 1; k <= steps; ++k) {
    const double t = (k - 1) * stepper.dt();
    stepper.step(state, t);
    if (k % config.record_every == 0 || k == steps) record_state(traj, state, config, true, k * stepper.dt());
  }
  return traj;
}

Trajectory run_pks(const SolverConfig& config) {
  ParabolicStepper stepper(config);
  SpectralState<double> state = initial_state(config);
  state.w_hat.rightCols(config.grid.dim()).setZero();
  const long steps = config.step_count();
  Trajectory traj;
  record_state(traj, state, config, false, 0.0);
  for (long k = 1; k <= steps; ++k) {
    stepper.step(state, (k - 1) * stepper.dt());
    if (k % config.record_every == 0 || k == steps) record_state(traj, state, config, false, k * stepper.dt());
  }
  return traj;
}

Comparison run_comparison(const SolverConfig& config) {
  SolverConfig hyper = config;
  hyper.regime = Regime::ZeroState;
  SolverConfig parab = config;
  parab.regime = Regime::Pks;
  HyperbolicStepper hs(hyper);
  ParabolicStepper ps(parab);
  if (hs.dt() != ps.dt()) throw std::logic_error("hyperbolic and parabolic time grids differ");

  SpectralState<double> w = initial_state(hyper);
  SpectralState<double> p = w;
  p.w_hat.rightCols(config.grid.dim()).setZero();

  Comparison out;
  out.diff_u.label = "diff_u_L2";
  out.diff_phi.label = "diff_phi_L2";
  auto record = [&](double t) {
    record_state(out.hyperbolic, w, hyper, true, t);
    record_state(out.parabolic, p, parab, false, t);
    out.diff_u.push(t, spectral_l2_norm(config.grid, VectorXc<double>(w.w_hat.col(0) - p.w_hat.col(0))));
    out.diff_phi.push(t, spectral_l2_norm(config.grid, VectorXc<double>(w.phi_hat - p.phi_hat)));
  };
  const long steps = config.step_count();
  record(0.0);
  for (long k = 1; k <= steps; ++k) {
    const double t = (k - 1) * hs.dt();
    hs.step(w, t);
    ps.step(p, t);
    if (k % config.record_every == 0 || k == steps) record(k * hs.dt());
  }
  return out;
}

double relative_state_gap(const SpectralState<double>& a, const SpectralState<double>& reference) {
  if (!(a.grid == reference.grid)) throw std::invalid_argument("state grids differ");
  const Grid<double>& g = a.grid;
  double diff = 0;
  double ref = 0;
  for (int c = 0; c < a.w_hat.cols(); ++c) {
    diff += std::pow(spectral_l2_norm(g, VectorXc<double>(a.w_hat.col(c) - reference.w_hat.col(c))), 2);
    ref += std::pow(spectral_l2_norm(g, VectorXc<double>(reference.w_hat.col(c))), 2);
  }
  diff += std::pow(spectral_l2_norm(g, VectorXc<double>(a.phi_hat - reference.phi_hat)), 2);
  ref += std::pow(spectral_l2_norm(g, reference.phi_hat), 2);
  if (ref == 0) return std::sqrt(diff);
  return std::sqrt(diff / ref);
}

OracleResult duhamel_oracle(const SolverConfig& config, int n_picard, int quadrature_nodes) {
  config.validate();
  if (config.regime == Regime::Pks) throw std::invalid_argument("the Duhamel oracle covers the hyperbolic regimes only");
  if (config.t_end > 1) throw std::invalid_argument("Duhamel oracle requires t_end <= 1");
  if (n_picard < 3) throw std::invalid_argument("Duhamel oracle requires at least 3 Picard iterates");
  if (quadrature_nodes < 2) throw std::invalid_argument("Duhamel oracle requires at least 2 quadrature nodes");

  const Grid<double>& g = config.grid;
  const ModelParams<double>& params = config.params;
  const int m = quadrature_nodes;
  const double ds = config.t_end / (m - 1);

  // Kernels for every lag l * ds.
  std::vector<HyperbolicPropagator<double>> wave;
  std::vector<Eigen::VectorXcd> heat;
  wave.reserve(m);
  for (int l = 0; l < m; ++l) {
    wave.emplace_back(g, l * ds, params);
    heat.push_back(complex_multipliers(heat_multipliers(g, l * ds, params.b, 1.0)));
  }

  const SpectralState<double> initial = initial_state(config);
  std::vector<SpectralState<double>> free_flow(m, initial);
  for (int i = 0; i < m; ++i) {
    wave[i].apply(free_flow[i].w_hat);
    free_flow[i].phi_hat.array() *= heat[i].array();
  }

  const StationaryState<double> background = config.background();
  auto nonlinear = [&](const SpectralState<double>& s, double time) {
    const ScalarField<double> u(g, physical(g, s.w_hat.col(0)));
    const ScalarField<double> phi(g, physical(g, s.phi_hat));
    VectorField<double> v(g);
    v.values = physical_flux(g, s.w_hat);
    VectorField<double> grad_phi(g);
    grad_phi.values = physical_gradient(g, s.phi_hat);
    const SourceTerms<double> terms = guarded(
        time, [&] { return evaluate_sources(u, v, phi, grad_phi, config.sources, params, background); });
    SpectralState<double> rates(g);
    for (int j = 0; j < g.dim(); ++j) rates.w_hat.col(j + 1) = forward_transform(g, terms.rhs_v.values.col(j));
    rates.phi_hat = forward(terms.rhs_phi);
    return rates;
  };

  auto combined_norm = [&](const SpectralState<double>& s) {
    double sum = 0;
    for (int c = 0; c < s.w_hat.cols(); ++c) sum += std::pow(spectral_l2_norm(g, VectorXc<double>(s.w_hat.col(c))), 2);
    sum += std::pow(spectral_l2_norm(g, s.phi_hat), 2);
    return std::sqrt(sum);
  };

  double scale = 0;
  for (const auto& s : free_flow) scale = std::max(scale, combined_norm(s));
  const double floor = 1e-13 * std::max(1.0, scale);

  std::vector<SpectralState<double>> iterate = free_flow;
  OracleResult result;
  for (int k = 1; k <= n_picard; ++k) {
    std::vector<SpectralState<double>> rates;
    rates.reserve(m);
    for (int j = 0; j < m; ++j) rates.push_back(nonlinear(iterate[j], j * ds));

    std::vector<SpectralState<double>> next = free_flow;
    double delta = 0;
    for (int i = 1; i < m; ++i) {
      for (int j = 0; j <= i; ++j) {
        const double weight = (j == 0 || j == i) ? ds / 2 : ds;
        SpectralState<double> contribution = rates[j];
        wave[i - j].apply(contribution.w_hat);
        contribution.phi_hat.array() *= heat[i - j].array();
        next[i].w_hat += weight * contribution.w_hat;
        next[i].phi_hat += weight * contribution.phi_hat;
      }
      SpectralState<double> change = next[i];
      change.w_hat -= iterate[i].w_hat;
      change.phi_hat -= iterate[i].phi_hat;
      delta = std::max(delta, combined_norm(change));
    }
    if (!result.deltas.empty() && delta >= result.deltas.back() && result.deltas.back() > floor)
      throw ContractionError("outside contraction regime: Picard delta grew from " +
                             std::to_string(result.deltas.back()) + " to " + std::to_string(delta));
    result.deltas.push_back(delta);
    iterate = std::move(next);
  }
  result.state = iterate.back();
  return result;
}

}  // namespace chemo
