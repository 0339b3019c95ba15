#include "chemo/scenario.hpp"

#include "chemo/kernel_decay.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

namespace chemo {

namespace {

using json = nlohmann::json;

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

Check make_check(std::string name, double value, std::string relation, double threshold, std::string note = "") {
  Check c{std::move(name), value, std::move(relation), threshold, false, std::move(note)};
  if (c.relation == "<=")
    c.pass = value <= threshold;
  else if (c.relation == ">=")
    c.pass = value >= threshold;
  else
    c.pass = value == threshold;
  return c;
}

bool identically_zero(const NormSeries& s, FitWindow w) {
  for (std::size_t i = 0; i < s.size(); ++i)
    if (s.times[i] >= w.lo && s.times[i] <= w.hi && s.values[i] != 0) return false;
  return true;
}

// Fits every table row whose series exists; zero series and failed fits are reported, not thrown.
DecayReport fit_table(const std::map<std::string, NormSeries>& series, const std::vector<ExpectedRate>& table,
                      FitWindow window, RunSummary& summary) {
  std::map<std::string, DecayFit> fits;
  std::vector<ReportEntry> trivial;
  for (const ExpectedRate& row : table) {
    const auto it = series.find(row.quantity);
    if (it == series.end()) continue;
    if (identically_zero(it->second, window)) {
      ReportEntry e;
      e.quantity = row.quantity;
      e.expected_exponent = -row.rate;
      e.tolerance = default_tolerance(row.quantity);
      e.window = window;
      e.pass = true;
      e.note = "identically zero on the fit window";
      trivial.push_back(e);
      continue;
    }
    try {
      fits[row.quantity] = fit_decay(it->second, window);
    } catch (const std::exception& ex) {
      summary.issues.push_back("fit of " + row.quantity + " failed: " + ex.what());
    }
  }
  DecayReport report = assemble_report(fits, table);
  report.entries.insert(report.entries.end(), trivial.begin(), trivial.end());
  return report;
}

std::map<std::string, NormSeries> all_series(const Trajectory& traj, const std::string& prefix = "") {
  std::map<std::string, NormSeries> out;
  for (const std::string& label : traj.labels) {
    NormSeries s = traj.series(label);
    s.label = prefix + label;
    out[s.label] = std::move(s);
  }
  return out;
}

void add_trajectory(SeriesTable& table, const Trajectory& traj, const std::string& prefix = "") {
  if (table.times.empty()) table.times = traj.times;
  for (std::size_t c = 0; c < traj.labels.size(); ++c) table.add(prefix + traj.labels[c], traj.columns[c]);
}

void mass_diagnostic(const Trajectory& traj, RunSummary& summary) {
  const std::vector<double>& mass = traj.column("mass_u");
  const double m0 = mass.front();
  double drift = 0;
  for (double m : mass) drift = std::max(drift, std::abs(m - m0));
  summary.mass_drift = std::abs(m0) > 0 ? drift / std::abs(m0) : drift;
  if (summary.mass_drift > summary.config.diagnostics.mass_tolerance)
    summary.issues.push_back("mass drift " + fmt(summary.mass_drift) + " exceeds " +
                             fmt(summary.config.diagnostics.mass_tolerance));
}

void oracle_diagnostic(const SolverConfig& base, const DiagnosticSettings& d, RunSummary& summary) {
  SolverConfig short_run = base;
  short_run.t_end = d.oracle_t_end;
  short_run.dt = std::min(base.time_step(), d.oracle_t_end / 100);
  short_run.dt = short_run.time_step();
  try {
    const OracleResult oracle = duhamel_oracle(short_run, d.oracle_picard, d.oracle_nodes);
    summary.oracle_deltas = oracle.deltas;
    SpectralState<double> state = initial_state(short_run);
    HyperbolicStepper stepper(short_run);
    for (long k = 0; k < short_run.step_count(); ++k) stepper.step(state, k * stepper.dt());
    summary.oracle_gap = relative_state_gap(oracle.state, state);
    if (summary.oracle_gap > 1e-3)
      summary.issues.push_back("oracle gap " + fmt(summary.oracle_gap) + " exceeds 1e-3");
  } catch (const ContractionError& e) {
    summary.issues.push_back(e.what());
  }
}

std::vector<ExpectedRate> constant_state_table(int n) {
  std::vector<ExpectedRate> table;
  const double delta = constant_state_rate(n);
  for (const char* q : {"u_L2", "v_agg_L2", "phi_L2", "gphi_L2", "u_Linf", "v_agg_Linf", "phi_Linf", "gphi_Linf"})
    table.push_back({q, delta});
  return table;
}

void zero_state(const ScenarioConfig& config, ScenarioResult& out) {
  RunSummary& summary = out.summary;
  const SolverConfig& s = config.solver;
  const Trajectory traj = run(s);
  add_trajectory(out.table, traj);
  out.snapshots = traj.snapshots;
  summary.expected = expected_rates(s.grid.dim(), s.derivative_orders);
  summary.fits = fit_table(all_series(traj), summary.expected, config.window, summary);

  const auto fitted = [&](const std::string& q) {
    for (const ReportEntry& e : summary.fits.entries)
      if (e.quantity == q) return e.fitted_exponent;
    return std::nan("");
  };
  const double g = fitted("gphi_Linf");
  const double u = fitted("u_Linf");
  if (std::isfinite(g) && std::isfinite(u))
    summary.checks.push_back(make_check("gphi_Linf_exponent_vs_u_Linf", g, "<=", u + 0.1,
                                        "grad phi decays at least as fast as u in L-infinity, within 0.1"));
  mass_diagnostic(traj, summary);
  if (config.diagnostics.oracle) oracle_diagnostic(s, config.diagnostics, summary);
}

void constant_state(const ScenarioConfig& config, ScenarioResult& out) {
  RunSummary& summary = out.summary;
  const SolverConfig& s = config.solver;
  const Trajectory traj = run(s);
  add_trajectory(out.table, traj);
  out.snapshots = traj.snapshots;
  summary.expected = constant_state_table(s.grid.dim());
  const auto series = all_series(traj);
  summary.fits = fit_table(series, summary.expected, config.window, summary);

  const double delta = constant_state_rate(s.grid.dim());
  for (const ExpectedRate& row : summary.expected) {
    const NormSeries running = running_functional(series.at(row.quantity), delta);
    double at_start = 0;
    for (std::size_t i = 0; i < running.size(); ++i)
      if (running.times[i] <= config.window.lo) at_start = running.values[i];
    const std::string functional = running.kind == NormKind::Linf ? "N" : "M";
    summary.checks.push_back(make_check(functional + "_" + row.quantity + "_growth", running.values.back(), "<=",
                                        2 * at_start, "weighted supremum at t_end vs twice its value at window start"));
  }

  // The background state itself must be stationary.
  SolverConfig still = s;
  still.init = InitSpec{};
  still.t_end = 50 * still.time_step();
  still.dt = still.time_step();
  SpectralState<double> state = initial_state(still);
  HyperbolicStepper stepper(still);
  for (long k = 0; k < still.step_count(); ++k) stepper.step(state, k * stepper.dt());
  const double residual = state.w_hat.cwiseAbs().maxCoeff() + state.phi_hat.cwiseAbs().maxCoeff();
  summary.checks.push_back(make_check("zero_perturbation_stationary", residual, "==", 0.0,
                                      "max |coefficient| after 50 steps from the unperturbed background"));
  mass_diagnostic(traj, summary);
  if (config.diagnostics.oracle) oracle_diagnostic(s, config.diagnostics, summary);
}

void pks_compare(const ScenarioConfig& config, ScenarioResult& out) {
  RunSummary& summary = out.summary;
  const SolverConfig& s = config.solver;
  const int n = s.grid.dim();
  const Comparison cmp = run_comparison(s);
  add_trajectory(out.table, cmp.hyperbolic);
  add_trajectory(out.table, cmp.parabolic, "pks_");
  out.table.add("diff_u_L2", cmp.diff_u.values);
  out.table.add("diff_phi_L2", cmp.diff_phi.values);

  summary.expected = {{"diff_u_L2", comparison_rate(n)}, {"u_L2", conservative_rate(n, 0)},
                      {"pks_u_L2", conservative_rate(n, 0)}};
  auto series = all_series(cmp.hyperbolic);
  for (auto& [label, v] : all_series(cmp.parabolic, "pks_")) series[label] = v;
  series["diff_u_L2"] = cmp.diff_u;
  series["diff_phi_L2"] = cmp.diff_phi;
  summary.fits = fit_table(series, summary.expected, config.window, summary);

  double diff = std::nan(""), u = std::nan("");
  for (const ReportEntry& e : summary.fits.entries) {
    if (e.quantity == "diff_u_L2") diff = e.fitted_exponent;
    if (e.quantity == "u_L2") u = e.fitted_exponent;
  }
  if (std::isfinite(diff) && std::isfinite(u))
    summary.checks.push_back(make_check("diff_u_steeper_than_u", diff - u, "<=", -0.15,
                                        "fitted exponent of ||u - u_pks|| minus that of ||u||"));
  mass_diagnostic(cmp.hyperbolic, summary);
}

void kernel_rates(const ScenarioConfig& config, ScenarioResult& out) {
  RunSummary& summary = out.summary;
  const SolverConfig& s = config.solver;
  const Grid<double>& grid = s.grid;
  const int n = grid.dim();
  const KernelSplit<double> split = split_kernel(s.params, config.kernel.cutoff);
  const ScalarField<double> probe = gaussian_probe(grid, config.kernel.probe_width);
  const double t_max = std::max(config.window.hi, config.kernel.exp_window_hi);
  const std::vector<double> times = log_spaced_times(config.kernel.t_min, t_max, config.kernel.samples);
  out.table.times = times;

  struct BlockRow {
    Block in, out;
    double rate;
  };
  const double q = n / 4.0;
  const std::vector<BlockRow> rows = {{Block::Conservative, Block::Conservative, q},
                                      {Block::Conservative, Block::Dissipative, q + 0.5},
                                      {Block::Dissipative, Block::Conservative, q + 0.5},
                                      {Block::Dissipative, Block::Dissipative, q + 1}};
  constexpr double kBlockTolerance = 0.1;
  for (const BlockRow& row : rows) {
    const NormSeries series =
        measure_kernel_decay(split, grid, row.in, row.out, NormKind::L2, KernelPart::Diffusive, times, probe);
    out.table.add(series.label, series.values);
    summary.expected.push_back({series.label, row.rate});
    const DecayFit fit = fit_decay(series, config.window);
    ReportEntry e;
    e.quantity = series.label;
    e.expected_exponent = -row.rate;
    e.fitted_exponent = fit.exponent;
    e.gap = std::abs(fit.exponent + row.rate);
    e.tolerance = kBlockTolerance;
    e.r_squared = fit.r_squared;
    e.window = config.window;
    e.pass = e.gap <= kBlockTolerance;
    e.note = "two-sided: linear kernel rates are attained";
    if (!fit.reliable()) e.note += "; unreliable fit (r^2 < 0.98)";
    summary.fits.entries.push_back(e);
  }

  const NormSeries hyperbolic = measure_kernel_decay(split, grid, Block::Conservative, Block::Conservative,
                                                     NormKind::L2, KernelPart::Hyperbolic, times, probe);
  out.table.add(hyperbolic.label, hyperbolic.values);
  const DecayFit exp_fit =
      fit_decay(hyperbolic, {config.kernel.exp_window_lo, config.kernel.exp_window_hi}, FitKind::Exp);
  const double half_beta = s.params.beta / 2;
  summary.checks.push_back(make_check("Kcal_exponential_rate_rel_error", std::abs(-exp_fit.exponent - half_beta) / half_beta,
                                      "<=", 0.1, "fitted rate " + fmt(-exp_fit.exponent) + " vs beta/2"));

  const RefinedRemainderSeries refined = refined_remainder_decay(split, grid, times, probe);
  out.table.add(refined.remainder_11.label, refined.remainder_11.values);
  out.table.add(refined.remainder.label, refined.remainder.values);
  out.table.add(refined.diffusive.label, refined.diffusive.values);
  out.table.add(refined.ratio.label, refined.ratio.values);
  const std::vector<ExpectedRate> r_row = {{refined.remainder_11.label, q + 0.5}};
  summary.expected.push_back(r_row.front());
  const DecayReport r_report =
      assemble_report({{refined.remainder_11.label, fit_decay(refined.remainder_11, config.window)}}, r_row);
  summary.fits.entries.insert(summary.fits.entries.end(), r_report.entries.begin(), r_report.entries.end());

  double increases = 0;
  const NormSeries& ratio = refined.ratio;
  for (std::size_t i = 1; i < ratio.size(); ++i)
    if (ratio.times[i - 1] >= config.window.lo && ratio.times[i] <= config.window.hi &&
        ratio.values[i] >= ratio.values[i - 1])
      increases += 1;
  summary.checks.push_back(make_check("R1_over_K_nonmonotone_steps", increases, "==", 0.0,
                                      "count of non-decreasing steps of the ratio on the fit window"));
}

json ini_to_json(const std::string& ini) {
  json out = json::object();
  std::istringstream in(ini);
  std::string line, section;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line.front() == '[') {
      section = line.substr(1, line.size() - 2);
      out[section] = json::object();
      continue;
    }
    const auto eq = line.find(" = ");
    out[section][line.substr(0, eq)] = line.substr(eq + 3);
  }
  return out;
}

std::string snapshot_csv(const Snapshot& snap) {
  const Grid<double>& g = snap.u.grid;
  std::ostringstream o;
  for (int d = 0; d < g.dim(); ++d) o << "x" << d << ",";
  o << "u";
  for (int j = 0; j < g.dim(); ++j) o << ",v" << j + 1;
  o << ",phi\n";
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    for (int d = 0; d < g.dim(); ++d) o << fmt(g.coordinate(i, d)) << ",";
    o << fmt(snap.u.values(i));
    for (int j = 0; j < g.dim(); ++j) o << "," << fmt(snap.v.values(i, j));
    o << "," << fmt(snap.phi.values(i)) << "\n";
  }
  return o.str();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << content;
}

}  // namespace

void SeriesTable::add(const std::string& label, const std::vector<double>& values) {
  if (values.size() != times.size()) throw std::invalid_argument("column " + label + " does not match the time grid");
  labels.push_back(label);
  columns.push_back(values);
}

bool RunSummary::pass() const {
  if (blew_up() || !issues.empty() || !fits.all_pass()) return false;
  for (const Check& c : checks)
    if (!c.pass) return false;
  return true;
}

ScenarioResult run_scenario(const ScenarioConfig& config) {
  ScenarioResult out;
  out.summary.config = config;
  if (config.snapshots && out.summary.config.solver.snapshot_every == 0) {
    const long records = config.solver.step_count() / config.solver.record_every + 1;
    out.summary.config.solver.snapshot_every = static_cast<int>(std::max(1L, records / 8));
  }
  const ScenarioConfig& c = out.summary.config;
  const auto start = std::chrono::steady_clock::now();
  try {
    switch (c.scenario) {
      case ScenarioKind::ZeroState: zero_state(c, out); break;
      case ScenarioKind::ConstantState: constant_state(c, out); break;
      case ScenarioKind::PksCompare: pks_compare(c, out); break;
      case ScenarioKind::KernelRates: kernel_rates(c, out); break;
    }
  } catch (const BlowUpError& e) {
    out.summary.blow_up = e.what();
    out.summary.issues.push_back(e.what());
  }
  out.summary.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

RunSummary execute(const ScenarioConfig& config) {
  const ScenarioResult result = run_scenario(config);
  const std::filesystem::path dir(config.output_dir);
  std::filesystem::create_directories(dir);
  write_file(dir / "series.csv", series_csv(result.table));
  write_file(dir / "report.json", report_json(result.summary));
  if (!result.snapshots.empty()) {
    std::filesystem::create_directories(dir / "snapshots");
    for (std::size_t i = 0; i < result.snapshots.size(); ++i) {
      char name[64];
      std::snprintf(name, sizeof name, "snapshot_%04zu.csv", i);
      write_file(dir / "snapshots" / name, snapshot_csv(result.snapshots[i]));
    }
  }
  return result.summary;
}

std::string series_csv(const SeriesTable& table) {
  std::string out = "t";
  for (const std::string& label : table.labels) out += "," + label;
  out += "\n";
  for (std::size_t i = 0; i < table.times.size(); ++i) {
    out += fmt(table.times[i]);
    for (const auto& col : table.columns) out += "," + fmt(col[i]);
    out += "\n";
  }
  return out;
}

std::string report_json(const RunSummary& s) {
  json j;
  j["scenario"] = to_string(s.config.scenario);
  j["seed"] = s.config.seed;
  j["config"] = ini_to_json(to_ini(s.config));
  j["expected_rates"] = json::array();
  for (const ExpectedRate& r : s.expected)
    j["expected_rates"].push_back({{"quantity", r.quantity}, {"rate", r.rate}, {"expected_exponent", -r.rate}});
  j["fits"] = json::array();
  for (const ReportEntry& e : s.fits.entries)
    j["fits"].push_back({{"quantity", e.quantity},
                         {"expected_exponent", e.expected_exponent},
                         {"fitted_exponent", e.fitted_exponent},
                         {"gap", e.gap},
                         {"tolerance", e.tolerance},
                         {"r_squared", e.r_squared},
                         {"window", {e.window.lo, e.window.hi}},
                         {"pass", e.pass},
                         {"note", e.note}});
  j["checks"] = json::array();
  for (const Check& c : s.checks)
    j["checks"].push_back({{"name", c.name},
                           {"value", c.value},
                           {"relation", c.relation},
                           {"threshold", c.threshold},
                           {"pass", c.pass},
                           {"note", c.note}});
  json d;
  d["mass_drift"] = s.mass_drift;
  if (s.oracle_gap >= 0) {
    d["oracle_gap"] = s.oracle_gap;
    d["oracle_deltas"] = s.oracle_deltas;
  }
  d["blow_up"] = s.blow_up.empty() ? json(nullptr) : json(s.blow_up);
  d["issues"] = s.issues;
  j["diagnostics"] = d;
  j["wall_time_s"] = s.wall_time;
  j["pass"] = s.pass();
  return j.dump(2) + "\n";
}

int exit_code(const RunSummary& summary) {
  if (summary.blew_up()) return 3;
  return summary.pass() ? 0 : 1;
}

}  // namespace chemo
