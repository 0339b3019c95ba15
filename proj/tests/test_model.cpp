#include "chemo/calculus.hpp"
#include "chemo/model.hpp"

#include <doctest.h>

#include <numbers>
#include <random>

using namespace chemo;

namespace {

std::vector<VectorX<double>> random_directions(int dim, int count, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> normal;
  std::vector<VectorX<double>> out;
  while (static_cast<int>(out.size()) < count) {
    VectorX<double> xi(dim);
    for (auto& x : xi) x = normal(rng);
    if (xi.norm() > 1e-3) out.push_back(xi / xi.norm() * (0.1 + 3 * std::abs(normal(rng))));
  }
  return out;
}

}  // namespace

TEST_CASE("parameter validation") {
  ModelParams<double> p;
  CHECK_NOTHROW(p.validate());
  for (double ModelParams<double>::*field : {&ModelParams<double>::gamma, &ModelParams<double>::beta,
                                             &ModelParams<double>::a, &ModelParams<double>::b}) {
    ModelParams<double> bad;
    bad.*field = -1;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad.*field = 0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  }
  ModelParams<double> decoupled;
  decoupled.a = 0;
  CHECK_THROWS_AS(decoupled.validate(), std::invalid_argument);
  CHECK_NOTHROW(decoupled.validate(true));
}

TEST_CASE("stationary state") {
  const ModelParams<double> p{1, 1, 3, 2};
  const auto s = stationary_state(0.5, p);
  CHECK(s.phi_bar * p.b == doctest::Approx(p.a * s.u_bar));
  CHECK(s.phi_bar == doctest::Approx(0.75));
  CHECK_THROWS_AS(stationary_state(-0.1, p), std::invalid_argument);
}

TEST_CASE("conservative-dissipative change of variables") {
  const auto g = make_grid(1, 8, 1.0);
  ScalarField<double> u(g);
  u.values.setConstant(1.0);
  VectorField<double> v(g);
  v.values.col(0).setConstant(2.0);
  const auto [w1, w2] = cd_transform(u, v, 2.0);
  CHECK(w1.values == u.values);
  CHECK(w2.values.isApproxToConstant(1.0));

  const auto g2 = make_grid(2, 8, 1.0);
  ScalarField<double> ru(g2, VectorX<double>::Random(g2.size()));
  VectorField<double> rv(g2);
  rv.values = MatrixX<double>::Random(g2.size(), 2);
  for (double gamma : {0.3, 1.0, 4.0}) {
    const auto [a, b] = cd_transform(ru, rv, gamma);
    const auto [u2, v2] = cd_inverse(a, b, gamma);
    CHECK((u2.values - ru.values).cwiseAbs().maxCoeff() == 0);
    CHECK((v2.values - rv.values).cwiseAbs().maxCoeff() <= 1e-15);
  }
  const auto [same_u, same_v] = cd_transform(ru, rv, 1.0);
  CHECK(same_v.values == rv.values);
  CHECK_THROWS_AS(cd_transform(ru, rv, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(cd_inverse(ru, rv, -1.0), std::invalid_argument);
}

TEST_CASE("system matrices") {
  ModelParams<double> p;
  p.gamma = 3;
  p.beta = 0.7;
  const auto m1 = build_matrices(p, 1);
  MatrixX<double> a1(2, 2);
  a1 << 0, 3, 3, 0;
  CHECK(m1.A[0] == a1);
  CHECK(m1.B(0, 0) == 0);
  CHECK(m1.B(1, 1) == -0.7);

  for (int n = 1; n <= 3; ++n) {
    const auto m = build_matrices(p, n);
    REQUIRE(m.dim() == n);
    for (int j = 0; j < n; ++j) {
      CHECK(m.A[j] == m.A[j].transpose());
      CHECK(m.A[j](0, j + 1) == 3);
      CHECK(m.A[j].cwiseAbs().sum() == doctest::Approx(6));
    }
    CHECK(m.B.row(0).isZero());
    CHECK(m.B.col(0).isZero());
    Eigen::SelfAdjointEigenSolver<MatrixX<double>> eig(m.B.bottomRightCorner(n, n));
    CHECK(eig.eigenvalues().maxCoeff() < 0);
  }
  CHECK_THROWS_AS(build_matrices(p, 0), std::invalid_argument);
}

TEST_CASE("Shizuta-Kawashima condition") {
  for (double gamma : {0.5, 1.0, 2.0})
    for (double beta : {0.5, 2.0})
      for (int n = 1; n <= 3; ++n) {
        const auto m = build_matrices(ModelParams<double>{gamma, beta, 1, 1}, n);
        const auto r = sk_check(m, random_directions(n, 100, 17 * n));
        CHECK(r.satisfied);
      }

  for (int n = 1; n <= 3; ++n) {
    auto no_damping = build_matrices(ModelParams<double>{}, n);
    no_damping.B.setZero();
    const auto r = sk_check(no_damping, random_directions(n, 5, 1));
    CHECK_FALSE(r.satisfied);
    REQUIRE(r.witness_eigenvector.has_value());

    auto no_flux = build_matrices(ModelParams<double>{}, n);
    for (auto& a : no_flux.A) a.setZero();
    const auto r2 = sk_check(no_flux, random_directions(n, 5, 2));
    CHECK_FALSE(r2.satisfied);
    REQUIRE(r2.witness_eigenvector.has_value());
    CHECK((no_flux.B * *r2.witness_eigenvector).norm() < 1e-10);
  }

  const auto m = build_matrices(ModelParams<double>{}, 2);
  CHECK_THROWS_AS(sk_check(m, {VectorX<double>::Zero(2)}), std::invalid_argument);
}

TEST_CASE("source catalog values") {
  const auto g = make_grid(1, 64, 2 * std::numbers::pi);
  ModelParams<double> p;
  p.a = 1.5;
  ScalarField<double> u(g), phi(g);
  VectorField<double> v(g);
  u.values = VectorX<double>::LinSpaced(g.size(), -1, 1);

  SourceSpec<double> only_g;
  only_g.h = SensitivityKind::Zero;
  const auto t1 = evaluate_sources(u, v, phi, grad(phi), only_g, p);
  CHECK(t1.rhs_v.values.isZero());
  CHECK((t1.rhs_phi.values - 1.5 * u.values).cwiseAbs().maxCoeff() < 1e-15);

  ScalarField<double> one(g);
  one.values.setOnes();
  for (Eigen::Index i = 0; i < g.size(); ++i) phi.values(i) = std::sin(g.coordinate(i, 0));
  const auto t2 = evaluate_sources(one, v, phi, grad(phi), SourceSpec<double>::default_coupling(), p);
  for (Eigen::Index i = 0; i < g.size(); ++i) CHECK(t2.rhs_v.values(i, 0) == doctest::Approx(std::cos(g.coordinate(i, 0))));

  SourceSpec<double> quad;
  quad.fbar = ProductionKind::Quad;
  quad.fbar_c1 = 1;
  ScalarField<double> twos(g);
  twos.values.setConstant(2);
  const auto t3 = evaluate_sources(twos, v, ScalarField<double>(g), VectorField<double>(g), quad, p);
  CHECK(t3.rhs_phi.values.isApproxToConstant(2 * p.a + 4));

  ScalarField<double> bad = one;
  bad.values(0) = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(evaluate_sources(bad, v, phi, grad(phi), SourceSpec<double>::default_coupling(), p), std::runtime_error);
}

TEST_CASE("source catalog satisfies its smallness bounds near the origin") {
  std::mt19937 rng(99);
  std::uniform_real_distribution<double> unit(-0.5, 0.5);
  std::vector<SourceSpec<double>> catalog;
  for (auto h : {SensitivityKind::Zero, SensitivityKind::Grad, SensitivityKind::Sat})
    for (auto bbar : {DampingKind::Zero, DampingKind::Quad})
      for (auto fbar : {ProductionKind::Zero, ProductionKind::Quad}) {
        SourceSpec<double> s;
        s.h = h;
        s.chi = -1.7;
        s.bbar = bbar;
        s.bbar_c3 = 0.8;
        s.fbar = fbar;
        s.fbar_c1 = 2;
        s.fbar_c2 = -0.3;
        catalog.push_back(s);
      }
  const double slack = 1 + 1e-12;
  for (const auto& s : catalog)
    for (int k = 0; k < 1000; ++k) {
      const double z = unit(rng), w = unit(rng);
      CHECK(std::abs(s.bbar_value(z, w)) <= slack * s.bbar_bound_constant() * (std::abs(z) + std::abs(w)));
      CHECK(std::abs(s.sensitivity_factor(z) * w) <= slack * s.h_bound_constant() * (std::abs(z) + std::abs(w)));
      CHECK(std::abs(s.g_value(z)) <= slack * s.g_bound_constant() * std::abs(z));
      CHECK(std::abs(s.fbar_value(z, w)) <= slack * s.fbar_bound_constant() * (z * z + w * w));
    }
  const auto zero = SourceSpec<double>::zero();
  CHECK(zero.bbar_value(0, 0) == 0);
  CHECK(zero.sensitivity_factor(0) == 0);
  CHECK(zero.g_value(0) == 0);
  CHECK(zero.fbar_value(0, 0) == 0);
}
