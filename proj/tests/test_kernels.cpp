#include "chemo/kernel_decay.hpp"
#include "chemo/kernels.hpp"

#include <doctest.h>

#include <numbers>
#include <random>

using namespace chemo;
using Complex = std::complex<double>;

namespace {

VectorX<double> random_xi(std::mt19937& rng, int dim, double max_norm) {
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> radius(0, max_norm);
  VectorX<double> xi(dim);
  for (auto& x : xi) x = normal(rng);
  return xi / xi.norm() * radius(rng);
}

MatrixXc<double> random_state(const Grid<double>& g, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> normal;
  MatrixXc<double> w(g.size(), g.dim() + 1);
  for (int c = 0; c < w.cols(); ++c) {
    VectorX<double> f(g.size());
    for (auto& x : f) x = normal(rng);
    w.col(c) = forward_transform(g, f);
  }
  return w;
}

}  // namespace

TEST_CASE("damped-wave eigenvalues") {
  const auto [p, m] = damped_wave_eigen(0.25, 1.0, 1.0);
  CHECK(p.real() == doctest::Approx((-1 + std::sqrt(0.75)) / 2).epsilon(1e-12));
  CHECK(m.real() == doctest::Approx((-1 - std::sqrt(0.75)) / 2).epsilon(1e-12));
  CHECK(p.real() == doctest::Approx(-0.06699).epsilon(1e-4));
  CHECK(p.imag() == 0);

  const auto [p1, m1] = damped_wave_eigen(1.0, 1.0, 1.0);
  CHECK(p1.real() == doctest::Approx(-0.5));
  CHECK(std::abs(p1.imag()) == doctest::Approx(std::sqrt(3.0) / 2));
  CHECK(m1 == std::conj(p1));

  const auto [p0, m0] = damped_wave_eigen(0.0, 2.0, 3.0);
  CHECK(p0 == Complex(0, 0));
  CHECK(m0 == Complex(-3, 0));

  // Both roots satisfy the characteristic polynomial.
  for (double k : {0.1, 0.5, 0.7, 3.0}) {
    const auto [a, b] = damped_wave_eigen(k, 1.3, 0.9);
    for (Complex l : {a, b}) CHECK(std::abs(l * l + 0.9 * l + 1.69 * k * k) < 1e-12);
  }
}

TEST_CASE("matrix exponential oracle on known cases") {
  Eigen::Matrix2d rot;
  rot << 0, 1, -1, 0;
  const Eigen::Matrix2d e = expm(rot * 2.0);
  CHECK(e(0, 0) == doctest::Approx(std::cos(2.0)).epsilon(1e-14));
  CHECK(e(0, 1) == doctest::Approx(std::sin(2.0)).epsilon(1e-14));
  Eigen::Matrix3d diag = Eigen::Vector3d(-40.0, 0.5, 3.0).asDiagonal();
  const Eigen::Matrix3d ed = expm(diag);
  CHECK(ed(0, 0) == doctest::Approx(std::exp(-40.0)).epsilon(1e-12));
  CHECK(ed(2, 2) == doctest::Approx(std::exp(3.0)).epsilon(1e-13));
  Eigen::Matrix2d nil;
  nil << 0, 5, 0, 0;
  const Eigen::Matrix2d en = expm(nil);
  CHECK(en(0, 1) == doctest::Approx(5.0));
  CHECK(en(0, 0) == doctest::Approx(1.0));
}

TEST_CASE("closed-form propagator agrees with the generic matrix exponential") {
  std::mt19937 rng(2024);
  std::uniform_real_distribution<double> time(0, 5);
  double worst = 0;
  for (int n = 1; n <= 3; ++n)
    for (double gamma : {0.5, 1.0, 2.0})
      for (double beta : {0.5, 1.0, 2.0}) {
        const ModelParams<double> p{gamma, beta, 1, 1};
        const double r = branch_radius(p);
        for (int i = 0; i < 1000; ++i) {
          VectorX<double> xi = random_xi(rng, n, 4 * r);
          if (i % 10 == 0) xi = xi / std::max(xi.norm(), 1e-300) * r * (1 + 1e-4 * (i % 3 - 1));
          const double t = time(rng);
          const MatrixXc<double> closed = closed_form_propagator(xi, t, p);
          const MatrixXc<double> generic = generic_propagator(xi, t, p);
          worst = std::max(worst, (closed - generic).norm() / std::max(1.0, generic.norm()));
        }
      }
  CHECK(worst <= 1e-10);
}

TEST_CASE("propagator structure") {
  const ModelParams<double> p{1.3, 0.8, 1, 1};
  const auto g = make_grid(2, 16, 7.0);
  const MatrixXc<double> w = random_state(g, 1);

  CHECK((propagate_hyperbolic(g, w, 0.0, p) - w).norm() <= 1e-13 * w.norm());

  const MatrixXc<double> later = propagate_hyperbolic(g, w, 2.5, p);
  CHECK(std::abs(later(0, 0) - w(0, 0)) < 1e-12 * std::abs(w(0, 0)));
  for (int j = 1; j <= 2; ++j) CHECK(std::abs(later(0, j) - std::exp(-0.8 * 2.5) * w(0, j)) < 1e-12 * (1 + std::abs(w(0, j))));

  // A transverse flux (v perpendicular to xi, u = 0) is only damped.
  VectorX<double> xi(2);
  xi << 0.6, -1.1;
  Eigen::VectorXcd transverse(3);
  transverse << 0, 1.1, 0.6;
  const Eigen::VectorXcd out = closed_form_propagator(xi, 1.7, p) * transverse;
  CHECK((out - std::exp(-0.8 * 1.7) * transverse).norm() < 1e-14);

  CHECK_NOTHROW(propagate_hyperbolic(g, w, 0.9, p, true));
  CHECK_THROWS_AS(propagate_hyperbolic(g, w, -1.0, p), std::invalid_argument);
  CHECK_THROWS_AS(propagate_hyperbolic(g, MatrixXc<double>(w.leftCols(2)), 1.0, p), std::invalid_argument);
}

TEST_CASE("semigroup property of the hyperbolic flow") {
  const ModelParams<double> p{1.0, 1.0, 1, 1};
  for (int n = 1; n <= 3; ++n) {
    const auto g = make_grid(n, n == 3 ? 8 : 16, 6.0);
    const MatrixXc<double> w = random_state(g, 40 + n);
    for (double t : {0.1, 0.7, 1.3})
      for (double s : {0.1, 0.7, 1.3}) {
        const MatrixXc<double> once = propagate_hyperbolic(g, w, t + s, p);
        const MatrixXc<double> twice = propagate_hyperbolic(g, propagate_hyperbolic(g, w, t, p), s, p);
        CHECK((once - twice).norm() / once.norm() < 1e-9);
      }
  }
}

TEST_CASE("mode symbol conjugation and spectrum") {
  std::mt19937 rng(5);
  const ModelParams<double> p{0.7, 1.9, 1, 1};
  for (int n = 1; n <= 3; ++n)
    for (int i = 0; i < 50; ++i) {
      const VectorX<double> xi = random_xi(rng, n, 5);
      const MatrixXc<double> m = mode_symbol(xi, p);
      CHECK((mode_symbol(VectorX<double>(-xi), p) - m.conjugate()).norm() < 1e-14);
      Eigen::ComplexEigenSolver<MatrixXc<double>> eig(m);
      CHECK(eig.eigenvalues().real().maxCoeff() <= 1e-12);
    }
}

TEST_CASE("complex branch decays at exactly beta/2") {
  const ModelParams<double> p{1.0, 1.0, 1, 1};
  for (double k : {0.6, 1.0, 3.0})
    for (double t : {0.5, 2.0, 7.0}) {
      VectorX<double> xi(1);
      xi << k;
      Eigen::ComplexEigenSolver<MatrixXc<double>> eig(closed_form_propagator(xi, t, p));
      CHECK(eig.eigenvalues().cwiseAbs().maxCoeff() == doctest::Approx(std::exp(-t / 2)).epsilon(1e-10));
    }
}

TEST_CASE("heat propagator") {
  const auto g = make_grid(1, 16, 2 * std::numbers::pi);
  VectorXc<double> phi = VectorXc<double>::Zero(g.size());
  phi(1) = 1;
  phi(0) = 2;
  const VectorXc<double> out = propagate_heat(g, phi, 0.5, 1.0, 1.0);
  CHECK(out(1).real() == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
  CHECK(out(1).real() == doctest::Approx(0.36788).epsilon(1e-5));
  CHECK((propagate_heat(g, phi, 0.0, 1.0) - phi).norm() == 0);
  CHECK(propagate_heat(g, phi, 3.0, 0.0)(0) == phi(0));
  CHECK_THROWS_AS(heat_multipliers(g, 1.0, 1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(heat_multipliers(g, -1.0, 1.0, 1.0), std::invalid_argument);
}

TEST_CASE("kernel split") {
  const ModelParams<double> p{1.0, 1.0, 1, 1};
  const auto split = split_kernel(p);
  CHECK(split.cutoff_radius == 0.5);
  CHECK(split_kernel(ModelParams<double>{2.0, 1.0, 1, 1}).cutoff_radius == 0.25);
  CHECK_THROWS_AS(split_kernel(p, -1.0), std::invalid_argument);

  std::mt19937 rng(8);
  for (int n = 1; n <= 3; ++n)
    for (int i = 0; i < 100; ++i) {
      const VectorX<double> xi = random_xi(rng, n, 2);
      for (double t : {0.0, 0.3, 4.0}) {
        const MatrixXc<double> full = split.full_mode(xi, t);
        const MatrixXc<double> sum = split.diffusive_mode(xi, t) + split.hyperbolic_mode(xi, t);
        CHECK((full - sum).cwiseAbs().maxCoeff() == 0);
        const MatrixXc<double> rebuilt = refined_remainder_mode(split, xi, t) + heat_expansion_mode(xi, t, p);
        CHECK((rebuilt - split.diffusive_mode(xi, t)).cwiseAbs().maxCoeff() < 1e-15);
        CHECK(refined_remainder_mode(split, xi, t).allFinite());
      }
    }
  VectorX<double> far(1);
  far << 1.0;
  CHECK(split.diffusive_mode(far, 1.0).isZero());
}

TEST_CASE("heat expansion is the leading diffusive behaviour") {
  // Under diffusive scaling t = 1/k^2 the eigenvalue error O(k^4 t) and the
  // second-order projector terms both leave a relative remainder of order k^2.
  for (double gamma : {0.5, 1.0, 2.0}) {
    const ModelParams<double> p{gamma, 1.5, 1, 1};
    const auto split = split_kernel(p);
    auto relative = [&](double k) {
      VectorX<double> xi(2);
      xi << 0.6 * k, 0.8 * k;
      const double t = 1 / (k * k);
      return refined_remainder_mode(split, xi, t).norm() / split.diffusive_mode(xi, t).norm();
    };
    const double r = branch_radius(p);
    const double e1 = relative(0.02 * r), e2 = relative(0.01 * r);
    CHECK(e1 < 0.1);
    CHECK(e2 / e1 == doctest::Approx(0.25).epsilon(0.1));
  }
}

TEST_CASE("kernel decay measurement plumbing") {
  const auto g = make_grid(1, 256, 40.0);
  const auto probe = gaussian_probe(g, 4 * g.spacing());
  CHECK(norm(probe, NormKind::L1) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK_THROWS_AS(gaussian_probe(g, 0.0), std::invalid_argument);

  const auto split = split_kernel(ModelParams<double>{});
  const auto s = measure_kernel_decay(split, g, Block::Conservative, Block::Conservative, NormKind::L2,
                                      KernelPart::Full, {0.0, 1.0}, probe);
  CHECK(s.label == "full_L0_to_L0_L2");
  CHECK(s.values[0] == doctest::Approx(norm(probe, NormKind::L2)).epsilon(1e-12));
  CHECK(s.values[1] < s.values[0]);
  const auto d = measure_kernel_decay(split, g, Block::Dissipative, Block::Dissipative, NormKind::Linf,
                                      KernelPart::Hyperbolic, {0.5}, probe);
  CHECK(d.label == "Kcal_Lm_to_Lm_Linf");
  CHECK_THROWS_AS(measure_kernel_decay(split, g, Block::Conservative, Block::Conservative, NormKind::L2,
                                       KernelPart::Full, {-1.0}, probe),
                  std::invalid_argument);

  const auto times = log_spaced_times(1, 100, 5);
  CHECK(times.front() == 1);
  CHECK(times.back() == 100);
  CHECK(times[2] == doctest::Approx(10));
  CHECK_THROWS_AS(log_spaced_times(0, 1, 5), std::invalid_argument);
  CHECK_THROWS_AS(log_spaced_times(2, 1, 5), std::invalid_argument);
}
