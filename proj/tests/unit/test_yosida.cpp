// SPDX-License-Identifier: Apache-2.0

#include <cmath>

#include "util.hpp"
#include "yosida/yosida.hpp"

using namespace yosida;
using namespace testutil;

TEST_SUITE("yosida") {

TEST_CASE("yosida approximation examples") {
  CHECK(yosida_approx(real({{1}}), 10.0)(0, 0).real() == doctest::Approx(10.0 / 9.0).epsilon(1e-14));
  CHECK(operator_norm(yosida_approx(OperatorMatrix::zero(3), 7.0)) == 0.0);
  const auto d = yosida_approx(diag({-1, -2}), 100.0);
  CHECK(d(0, 0).real() == doctest::Approx(-100.0 / 101.0).epsilon(1e-12));
  CHECK(d(1, 1).real() == doctest::Approx(-200.0 / 102.0).epsilon(1e-12));
  CHECK(d(0, 0).real() == doctest::Approx(-0.99010).epsilon(1e-5));
  CHECK(d(1, 1).real() == doctest::Approx(-1.96078).epsilon(1e-5));
}

TEST_CASE("yosida approximation at an eigenvalue") {
  CHECK(error_kind([] { yosida_approx(diag({3}), 3.0); }) == ErrorKind::SingularResolvent);
}

TEST_CASE("default mu grid") {
  const auto grid = default_mu_grid(diag({-1, 0.5}), diag({-1, -2}));
  REQUIRE(grid.size() == 64);
  CHECK(grid.front() == doctest::Approx(3.0));  // 2 (1 + 0.5)
  CHECK(grid.back() == doctest::Approx(3e8).epsilon(1e-12));
  for (std::size_t k = 1; k < grid.size(); ++k) CHECK(grid[k] > grid[k - 1]);

  MuGridConfig cfg;
  cfg.mu0 = 0.5;
  CHECK(error_kind([&] { default_mu_grid(diag({1}), diag({1}), cfg); }) == ErrorKind::InvalidInput);
  cfg = {};
  cfg.points = 3;
  CHECK(error_kind([&] { default_mu_grid(diag({1}), diag({1}), cfg); }) == ErrorKind::InvalidInput);
}

TEST_CASE("yosida distance examples") {
  SeededRng rng(201);
  const auto a = random_matrix(rng, 4);
  const auto same = yosida_distance(a, a);
  CHECK(same.value == 0.0);
  CHECK(same.converged);

  const auto nil = real({{0, 1}, {0, 0}});
  const auto shifted = nil + 0.1 * OperatorMatrix::identity(2);
  const auto e = yosida_distance(nil, shifted);
  CHECK(e.converged);
  CHECK(std::abs(e.value - 0.1) <= 1e-4);

  const auto b = random_matrix(rng, 5);
  const auto c = random_matrix(rng, 5);
  const auto est = yosida_distance(b, c);
  CHECK(est.converged);
  CHECK(std::abs(est.value - operator_norm(b - c)) <= 1e-4);
  CHECK(est.mu_grid.size() == est.samples.size());
}

TEST_CASE("dimension mismatch") {
  CHECK(error_kind([] { yosida_distance(diag({1}), diag({1, 2})); }) == ErrorKind::InvalidInput);
}

TEST_CASE("tail summary flags a growing tail as not converged") {
  YosidaDistanceEstimate est;
  for (int k = 0; k < 16; ++k) {
    est.mu_grid.push_back(std::pow(10.0, k));
    est.samples.push_back(std::pow(10.0, 0.5 * k));
  }
  summarize_tail(est, MuGridConfig{});
  CHECK_FALSE(est.converged);
  CHECK(est.tail_slope == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(est.value == doctest::Approx(std::pow(10.0, 7.5)));
}

TEST_CASE("bounded perturbation examples") {
  const auto stable = diag({-1, -2});
  const auto bound = semigroup_bound(stable, 10.0);
  const auto zero = verify_bounded_perturbation_bound(stable, OperatorMatrix::zero(2), bound);
  CHECK(zero.lhs == 0.0);
  CHECK(zero.holds);

  SeededRng rng(202);
  const auto c = random_matrix(rng, 2, 0.3);
  const auto r = verify_bounded_perturbation_bound(stable, c, bound);
  CHECK(r.holds);
  CHECK(r.lhs == doctest::Approx(operator_norm(c)).epsilon(1e-6));
  CHECK(r.rhs == doctest::Approx(operator_norm(c)).epsilon(1e-9));

  const auto jordan = real({{-1, 10}, {0, -1}});
  const auto small = random_matrix(rng, 2, 0.01);
  const auto rj = verify_bounded_perturbation_bound(jordan, small, semigroup_bound(jordan, 10.0));
  CHECK(rj.holds);
  CHECK(rj.rhs > rj.lhs);
}

TEST_CASE("class P constant examples") {
  const double k1 = 1.0 - std::exp(-1.0);
  const auto zero = class_P_constant(diag({-1, -2}), OperatorMatrix::zero(2));
  CHECK(zero.K == 0.0);
  CHECK(zero.holds);

  const auto unit = class_P_constant(-1.0 * OperatorMatrix::identity(2), OperatorMatrix::identity(2));
  CHECK(std::abs(unit.K - k1) <= 1e-6);
  CHECK(unit.quadrature_error <= 1e-6);
  // Bounded C: d_Y(A, A + C) = ||C|| = 1 exceeds K, so the inequality fails here.
  CHECK(unit.dY == doctest::Approx(1.0).epsilon(1e-6));
  CHECK_FALSE(unit.holds);

  const auto block = class_P_constant(diag({-1, -4}), diag({1, 0}));
  CHECK(std::abs(block.K - k1) <= 1e-6);
}

TEST_CASE("class P quadrature settings are validated") {
  QuadratureConfig q;
  q.delta = 0.0;
  CHECK(error_kind([&] { class_P_constant(diag({-1}), diag({1}), q); }) == ErrorKind::InvalidInput);
}

TEST_CASE("semigroup difference examples") {
  const auto a = diag({-1, -2});
  const std::vector<double> ts{0.5, 1.0, 2.0};
  const auto same = semigroup_difference_bound(a, a, ts, 1.0, 0.0);
  for (const auto &row : same.rows) CHECK(row.lhs == 0.0);
  CHECK(same.all_hold);

  const auto b = a + 0.1 * OperatorMatrix::identity(2);
  const auto r = semigroup_difference_bound(a, b, {1.0}, 1.0, 0.0);
  REQUIRE(r.rows.size() == 1);
  // closed form: ||e^{tA}|| |e^{0.1 t} - 1| at t = 1
  CHECK(r.rows[0].lhs == doctest::Approx(std::exp(-1.0) * (std::exp(0.1) - 1.0)).epsilon(1e-12));
  CHECK(r.rows[0].lhs <= 0.1);
  CHECK(r.all_hold);

  CHECK(error_kind([&] { semigroup_difference_bound(a, b, {1.0}, 0.5, 0.0); }) ==
        ErrorKind::InvalidInput);
  CHECK(error_kind([&] { semigroup_difference_bound(a, b, {-1.0}, 1.0, 0.0); }) ==
        ErrorKind::InvalidInput);
}

TEST_CASE("semigroup difference on random contraction pairs") {
  SeededRng rng(203);
  for (int trial = 0; trial < 10; ++trial) {
    const Eigen::MatrixXd g = rng.normal_matrix(4, 4);
    const Eigen::MatrixXd skew = 0.5 * (g - g.transpose());
    const auto a = OperatorMatrix::from_real(skew - Eigen::MatrixXd::Identity(4, 4));
    const auto b = a + random_matrix(rng, 4, 0.05);
    const auto bound = semigroup_bound(a, 10.0);
    const auto bb = semigroup_bound(b, 10.0);
    const double M = std::max(bound.M, bb.M);
    const double omega = std::max({0.0, bound.omega, bb.omega});
    const auto r = semigroup_difference_bound(a, b, {0.5, 1.0, 2.0}, M, omega);
    CHECK(r.all_hold);
  }
}

TEST_CASE("property: convergence of the approximation") {
  SeededRng rng(204);
  for (int trial = 0; trial < 30; ++trial) {
    const auto n = rng.integer(1, 6);
    const auto a = random_matrix(rng, n);
    const double na = operator_norm(a);
    Eigen::VectorXcd x = rng.normal_vector(n).cast<cplx>();
    x.normalize();
    for (double factor : {2.0, 10.0, 1e3}) {
      const double mu = factor * na;
      const double err = (yosida_approx(a, mu).matrix() * x - a.matrix() * x).norm();
      CHECK(err <= 2.0 * na * na / (mu - na));
    }
  }
}

TEST_CASE("property: symmetry and triangle inequality on a fixed grid") {
  SeededRng rng(205);
  for (int trial = 0; trial < 20; ++trial) {
    const auto n = rng.integer(2, 6);
    const auto a = random_matrix(rng, n);
    const auto b = random_matrix(rng, n);
    const auto c = random_matrix(rng, n);
    MuGridConfig cfg;
    cfg.mu0 = 2.0 * (1.0 + std::max({0.0, a.spectral_abscissa(), b.spectral_abscissa(),
                                     c.spectral_abscissa()}));
    const auto ab = yosida_distance(a, b, cfg);
    const auto ba = yosida_distance(b, a, cfg);
    CHECK(ab.value == ba.value);
    const auto bc = yosida_distance(b, c, cfg);
    const auto ac = yosida_distance(a, c, cfg);
    for (std::size_t k = 0; k < ac.samples.size(); ++k) {
      CHECK(ac.samples[k] <= ab.samples[k] + bc.samples[k] + 1e-9);
    }
  }
}

TEST_CASE("property: agreement with the norm of the difference") {
  SeededRng rng(206);
  for (int trial = 0; trial < 100; ++trial) {
    const auto n = rng.integer(2, 8);
    const auto a = random_matrix(rng, n);
    const auto b = random_matrix(rng, n);
    const double exact = operator_norm(a - b);
    const auto est = yosida_distance(a, b);
    CHECK(std::abs(est.value - exact) <= 1e-4 * (1.0 + exact));
  }
}

}  // TEST_SUITE
