#include "chemo/solver.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace chemo;

namespace {

SolverConfig small_config(double amplitude = 1e-2) {
  SolverConfig c;
  c.grid = make_grid(1, 128, 20.0);
  c.t_end = 1;
  c.init.u = {InitShape::Gaussian, amplitude, 1.0};
  c.init.v = {InitShape::Gaussian, amplitude / 2, 1.5, {9.0}};
  c.init.phi = {InitShape::Mode, amplitude, 1.0, {}, {2}};
  return c;
}

SpectralState<double> integrate(const SolverConfig& c) {
  SpectralState<double> s = initial_state(c);
  if (c.regime == Regime::Pks) {
    s.w_hat.rightCols(c.grid.dim()).setZero();
    ParabolicStepper stepper(c);
    for (long k = 0; k < c.step_count(); ++k) stepper.step(s, k * stepper.dt());
  } else {
    HyperbolicStepper stepper(c);
    for (long k = 0; k < c.step_count(); ++k) stepper.step(s, k * stepper.dt());
  }
  return s;
}

double observed_order(SolverConfig c, double dt) {
  c.dt = dt;
  const auto coarse = integrate(c);
  c.dt = dt / 2;
  const auto mid = integrate(c);
  c.dt = dt / 4;
  const auto fine = integrate(c);
  const double e1 = relative_state_gap(coarse, mid);
  const double e2 = relative_state_gap(mid, fine);
  return std::log2(e1 / e2);
}

}  // namespace

TEST_CASE("initial profiles") {
  const auto g = make_grid(2, 16, 8.0);
  const InitProfile gauss{InitShape::Gaussian, 0.3, 1.0};
  const auto f = gauss.evaluate(g);
  CHECK(f.values.maxCoeff() == doctest::Approx(0.3));
  CHECK(f.values((8 * 16) + 8) == doctest::Approx(0.3));

  const InitProfile mode{InitShape::Mode, 2.0, 1.0, {}, {1, 0}};
  const auto m = mode.evaluate(g);
  for (Eigen::Index i = 0; i < g.size(); ++i)
    CHECK(m.values(i) == doctest::Approx(2 * std::cos(2 * std::numbers::pi * g.coordinate(i, 0) / 8)));
  CHECK(InitProfile{}.evaluate(g).values.isZero());

  CHECK_THROWS_AS((InitProfile{InitShape::Mode, 1.0, 1.0, {}, {1}}).evaluate(g), std::invalid_argument);
  CHECK_THROWS_AS((InitProfile{InitShape::Gaussian, 1.0, 0.0}).evaluate(g), std::invalid_argument);
  CHECK_THROWS_AS((InitProfile{InitShape::Gaussian, 1.0, 1.0, {1.0}}).evaluate(g), std::invalid_argument);
}

TEST_CASE("solver configuration checks") {
  SolverConfig c = small_config();
  CHECK_NOTHROW(c.validate());
  CHECK(default_time_step(c.grid, c.params) == doctest::Approx(0.25 * 20.0 / 128));
  CHECK(default_time_step(make_grid(1, 8, 100.0), ModelParams<double>{1, 4, 1, 1}) == doctest::Approx(0.1));
  CHECK(default_time_step(make_grid(1, 8, 100.0), ModelParams<double>{1, 10, 1, 1}) == doctest::Approx(0.05));

  c.dt = 0.3;
  CHECK(c.step_count() == 4);
  CHECK(c.time_step() == doctest::Approx(0.25));
  c.dt = 0.25;
  CHECK(c.step_count() == 4);

  auto bad = small_config();
  bad.dt = -1;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = small_config();
  bad.dt = 2;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = small_config();
  bad.record_every = 0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = small_config();
  bad.regime = Regime::ConstantState;
  bad.u_bar = -1;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad.u_bar = 0.1;
  bad.sources.fbar = ProductionKind::Quad;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = small_config();
  bad.params.gamma = 0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("splitting is exact for the linear system") {
  for (int n = 1; n <= 2; ++n) {
    SolverConfig c = small_config(0.5);
    c.grid = make_grid(n, n == 1 ? 128 : 32, 20.0);
    c.init.v.center.assign(n, 9.0);
    c.init.phi.mode.assign(n, 2);
    c.sources = SourceSpec<double>::zero();
    c.params = {1.3, 0.7, 0, 1.1};
    for (double t : {1.0, 10.0}) {
      c.t_end = t;
      const auto s = integrate(c);
      auto ref = initial_state(c);
      ref.w_hat = propagate_hyperbolic(c.grid, ref.w_hat, t, c.params);
      ref.phi_hat = propagate_heat(c.grid, ref.phi_hat, t, c.params.b);
      CHECK(relative_state_gap(s, ref) < 1e-10);
    }
  }
}

TEST_CASE("free step function matches the stepper") {
  SolverConfig c = small_config(0.2);
  c.dt = 0.05;
  c.t_end = 0.05;
  const auto start = initial_state(c);
  auto a = start;
  HyperbolicStepper(c).step(a, 0);
  const auto b = step(start, 0.05, c);
  CHECK(relative_state_gap(a, b) == 0);
  CHECK_THROWS_AS(step(start, 0.0, c), std::invalid_argument);
}

TEST_CASE("zero data stays zero") {
  SolverConfig c = small_config();
  c.init = InitSpec{};
  c.t_end = 2;
  const Trajectory traj = run(c);
  for (const auto& col : traj.columns)
    for (double v : col) CHECK(v == 0);
  const Comparison cmp = run_comparison(c);
  for (double v : cmp.diff_u.values) CHECK(v == 0);
}

TEST_CASE("mass of u is conserved") {
  SolverConfig c = small_config(0.05);
  c.dt = 0.01;
  c.t_end = 10;
  c.record_every = 100;
  c.sources.bbar = DampingKind::Quad;
  c.sources.bbar_c3 = 0.5;
  c.sources.fbar = ProductionKind::Quad;
  c.sources.fbar_c1 = 1;
  const Trajectory traj = run(c);
  const auto& mass = traj.column("mass_u");
  for (double m : mass) CHECK(std::abs(m - mass.front()) <= 1e-9 * std::abs(mass.front()));

  c.regime = Regime::Pks;
  const Trajectory pks = run_pks(c);
  const auto& pmass = pks.column("mass_u");
  for (double m : pmass) CHECK(std::abs(m - pmass.front()) <= 1e-9 * std::abs(pmass.front()));
}

TEST_CASE("second-order self-convergence") {
  SolverConfig c = small_config(0.8);
  c.params = {1, 1, 1, 1};
  c.sources.chi = 2;
  c.sources.fbar = ProductionKind::Quad;
  c.sources.fbar_c1 = 0.5;
  c.sources.bbar = DampingKind::Quad;
  c.sources.bbar_c3 = 0.5;
  c.t_end = 1;
  CHECK(observed_order(c, 0.05) >= 1.9);

  c.regime = Regime::Pks;
  c.sources.bbar = DampingKind::Zero;
  CHECK(observed_order(c, 0.025) >= 1.9);
}

TEST_CASE("parabolic limit without transport is the heat flow") {
  SolverConfig c = small_config(0.1);
  c.regime = Regime::Pks;
  c.params = {1, 2.5, 0, 1};
  c.sources.h = SensitivityKind::Zero;
  c.init.u = {InitShape::Mode, 0.1, 1.0, {}, {3}};
  c.t_end = 4;
  const auto s = integrate(c);
  const double xi = 2 * std::numbers::pi * 3 / 20.0;
  const auto start = initial_state(c);
  const double expected = std::exp(-xi * xi * 4 / 2.5);
  CHECK(std::abs(s.w_hat(3, 0) - expected * start.w_hat(3, 0)) < 1e-8 * std::abs(start.w_hat(3, 0)));
}

TEST_CASE("constant state: the background is stationary") {
  SolverConfig c = small_config();
  c.regime = Regime::ConstantState;
  c.u_bar = 0.3;
  c.init = InitSpec{};
  c.t_end = 5;
  const auto s = integrate(c);
  CHECK(s.w_hat.cwiseAbs().maxCoeff() == 0);
  CHECK(s.phi_hat.cwiseAbs().maxCoeff() == 0);
  CHECK(c.background().phi_bar == doctest::Approx(0.3));
}

TEST_CASE("constant state couples u_bar grad phi into the flux") {
  SolverConfig c = small_config();
  c.init = InitSpec{};
  c.init.phi = {InitShape::Mode, 0.1, 1.0, {}, {1}};
  c.t_end = 0.5;
  const auto zero_state = integrate(c);
  c.regime = Regime::ConstantState;
  c.u_bar = 0.5;
  const auto around = integrate(c);
  CHECK(zero_state.w_hat.col(1).norm() < 1e-12 * around.w_hat.col(1).norm());
  CHECK(around.w_hat.col(1).norm() > 0);
}

TEST_CASE("trajectory recording") {
  SolverConfig c = small_config();
  c.dt = 0.1;
  c.t_end = 1;
  c.record_every = 3;
  c.derivative_orders = 2;
  c.snapshot_every = 2;
  const Trajectory traj = run(c);
  REQUIRE(traj.times.size() == 5);
  CHECK(traj.times[1] == doctest::Approx(0.3));
  CHECK(traj.times.back() == doctest::Approx(1.0));
  for (const char* label : {"u_L1", "u_L2", "u_Linf", "u_Hs", "u_D1_L2", "u_D2_L2", "v1_L2", "v_agg_L1", "v_agg_L2",
                            "v_agg_Linf", "v_Hs", "v_D2_L2", "phi_L2", "phi_D3_L2", "gphi_L2", "gphi_Linf", "mass_u"})
    CHECK(traj.has(label));
  CHECK(traj.series("u_Linf").kind == NormKind::Linf);
  CHECK(traj.series("v_agg_L1").kind == NormKind::L1);
  CHECK(traj.series("u_Hs").kind == NormKind::L2);
  CHECK_THROWS_AS(traj.column("nope"), std::out_of_range);
  CHECK(traj.snapshots.size() == 3);

  c.regime = Regime::Pks;
  const Trajectory pks = run(c);
  CHECK_FALSE(pks.has("v_agg_L2"));
  CHECK(pks.has("phi_Linf"));

  Trajectory t;
  t.record(0, {{"a", 1}});
  CHECK_THROWS_AS(t.record(0, {{"a", 1}}), std::invalid_argument);
  CHECK_THROWS_AS(t.record(1, {{"b", 1}}), std::invalid_argument);
  CHECK_THROWS_AS(t.record(1, {{"a", std::nan("")}}), BlowUpError);
}

TEST_CASE("non-finite states abort as blow-up") {
  SolverConfig c = small_config();
  c.dt = 0.1;
  auto s = initial_state(c);
  s.phi_hat(2) = std::numeric_limits<double>::infinity();
  HyperbolicStepper stepper(c);
  CHECK_THROWS_AS(stepper.step(s, 0.4), BlowUpError);
  try {
    auto s2 = initial_state(c);
    s2.phi_hat(2) = std::nan("");
    stepper.step(s2, 0.4);
  } catch (const BlowUpError& e) {
    CHECK(e.time() == doctest::Approx(0.4));
    CHECK(std::string(e.what()).find("blow-up or instability") != std::string::npos);
  }
}

TEST_CASE("Duhamel oracle") {
  SolverConfig c = small_config(0.5);
  c.t_end = 0.5;

  SolverConfig linear = c;
  linear.sources = SourceSpec<double>::zero();
  linear.params.a = 0;
  const OracleResult exact = duhamel_oracle(linear, 3, 16);
  auto ref = initial_state(linear);
  ref.w_hat = propagate_hyperbolic(linear.grid, ref.w_hat, 0.5, linear.params);
  ref.phi_hat = propagate_heat(linear.grid, ref.phi_hat, 0.5, linear.params.b);
  CHECK(relative_state_gap(exact.state, ref) < 1e-12);
  CHECK(exact.deltas.front() == 0);

  SolverConfig small = c;
  small.dt = 0.5 / 200;
  const OracleResult oracle = duhamel_oracle(small, 6, 64);
  CHECK(relative_state_gap(oracle.state, integrate(small)) <= 1e-3);
  REQUIRE(oracle.deltas.size() == 6);
  for (std::size_t k = 2; k < oracle.deltas.size(); ++k) CHECK(oracle.deltas[k] < 0.5 * oracle.deltas[k - 1]);

  SolverConfig longer = c;
  longer.t_end = 2;
  CHECK_THROWS_AS(duhamel_oracle(longer, 6, 64), std::invalid_argument);
  CHECK_THROWS_AS(duhamel_oracle(c, 2, 64), std::invalid_argument);
  SolverConfig pks = c;
  pks.regime = Regime::Pks;
  CHECK_THROWS_AS(duhamel_oracle(pks, 6, 64), std::invalid_argument);

  SolverConfig large = c;
  large.t_end = 1;
  large.sources.chi = 40;
  large.sources.fbar = ProductionKind::Quad;
  large.sources.fbar_c1 = 40;
  large.init.u.amplitude = 5;
  large.init.phi.amplitude = 5;
  CHECK_THROWS_AS(duhamel_oracle(large, 8, 32), ContractionError);
}
