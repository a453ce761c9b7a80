// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "util.hpp"

using namespace yosida;
using namespace testutil;

namespace {

std::vector<cplx> sorted(std::vector<cplx> v) {
  std::sort(v.begin(), v.end(), [](cplx a, cplx b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  return v;
}

OperatorMatrix random_spd(SeededRng &rng, Eigen::Index n) {
  const Eigen::MatrixXd g = rng.normal_matrix(n, n);
  return OperatorMatrix::from_real(g * g.transpose() + Eigen::MatrixXd::Identity(n, n));
}

}  // namespace

TEST_SUITE("linops") {

TEST_CASE("operator norm examples") {
  CHECK(operator_norm(OperatorMatrix::identity(3)) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(operator_norm(OperatorMatrix::zero(4)) == 0.0);
  CHECK(operator_norm(diag({-1, 2})) == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("non-finite entries are rejected") {
  CMatrix m = CMatrix::Identity(2, 2);
  m(0, 1) = std::numeric_limits<double>::quiet_NaN();
  CHECK(error_kind([&] { OperatorMatrix bad(m); }) == ErrorKind::InvalidOperator);
  m(0, 1) = std::numeric_limits<double>::infinity();
  CHECK(error_kind([&] { OperatorMatrix bad(m); }) == ErrorKind::InvalidOperator);
}

TEST_CASE("resolvent examples") {
  CHECK(dist(resolvent(OperatorMatrix::zero(1), 2.0), real({{0.5}})) < 1e-15);
  CHECK(dist(resolvent(diag({1, -1}), 3.0), diag({0.5, 0.25})) < 1e-15);
  CHECK(dist(resolvent(real({{0, 1}, {0, 0}}), 1.0), real({{1, 1}, {0, 1}})) < 1e-14);
}

TEST_CASE("resolvent at an eigenvalue carries the eigenvalue") {
  try {
    resolvent(diag({1, -1}), 1.0);
    FAIL("no error");
  } catch (const Error &e) {
    CHECK(e.kind() == ErrorKind::SingularResolvent);
    REQUIRE(e.eigenvalue.has_value());
    CHECK(std::abs(*e.eigenvalue - cplx(1.0)) < 1e-12);
  }
}

TEST_CASE("matrix exponential examples") {
  SeededRng rng(11);
  const auto a = random_matrix(rng, 5);
  CHECK(dist(matrix_exp(a, 0.0), OperatorMatrix::identity(5)) == 0.0);
  CHECK(dist(matrix_exp(diag({-1, 2}), 1.0), diag({std::exp(-1.0), std::exp(2.0)})) < 1e-13);
  CHECK(dist(matrix_exp(real({{0, 1}, {0, 0}}), 1.0), real({{1, 1}, {0, 1}})) < 1e-15);
}

TEST_CASE("matrix exponential overflow") {
  CHECK(error_kind([] { matrix_exp(diag({1e6}), 1.0); }) == ErrorKind::ExpOverflow);
  CHECK(error_kind([] { matrix_exp(diag({800}), 1.0); }) == ErrorKind::ExpOverflow);
}

TEST_CASE("matrix exponential of a rotation generator") {
  // exp(t [[0,-1],[1,0]]) is the rotation by t
  const double t = 2.3;
  const auto r = matrix_exp(real({{0, -1}, {1, 0}}), t);
  CHECK(dist(r, real({{std::cos(t), -std::sin(t)}, {std::sin(t), std::cos(t)}})) < 1e-14);
}

TEST_CASE("spectrum examples") {
  const auto d = sorted(spectrum(diag({1, 2, 3})).eigenvalues);
  REQUIRE(d.size() == 3);
  for (int k = 0; k < 3; ++k) CHECK(std::abs(d[k] - cplx(k + 1.0)) < 1e-14);

  const auto rot = sorted(spectrum(real({{0, -1}, {1, 0}})).eigenvalues);
  CHECK(std::abs(rot[0] - cplx(0, -1)) < 1e-14);
  CHECK(std::abs(rot[1] - cplx(0, 1)) < 1e-14);

  const auto golden = sorted(spectrum(real({{1, 1}, {1, 0}})).eigenvalues);
  const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
  CHECK(std::abs(golden[0] - cplx(1.0 - phi)) < 1e-14);
  CHECK(std::abs(golden[1] - cplx(phi)) < 1e-14);
}

TEST_CASE("semigroup bound examples") {
  const auto stable = semigroup_bound(diag({-1, -2}), 5.0);
  CHECK(stable.M == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(stable.omega == doctest::Approx(-1.0).epsilon(1e-6));
  CHECK(stable.grid.size() == static_cast<std::size_t>(kDefaultBoundGrid) + 1);  // plus t = 0

  const auto zero = semigroup_bound(OperatorMatrix::zero(2), 5.0);
  CHECK(zero.M == doctest::Approx(1.0));
  CHECK(std::abs(zero.omega) < 1e-8);

  // ||exp(tA)|| for [[-1,10],[0,-1]] peaks near t = 1 at about 10/e
  const auto jordan = real({{-1, 10}, {0, -1}});
  const auto b = semigroup_bound(jordan, 10.0);
  CHECK(b.M > 1.0);
  double dense_max = 0.0;
  for (int k = 0; k <= 2000; ++k) {
    const double t = 10.0 * k / 2000.0;
    dense_max = std::max(dense_max, operator_norm(matrix_exp(jordan, t)) * std::exp(-b.omega * t));
  }
  CHECK(b.M >= dense_max * (1.0 - 1e-3));
}

TEST_CASE("semigroup bound rejects bad windows") {
  CHECK(error_kind([] { semigroup_bound(diag({-1}), 0.0); }) == ErrorKind::InvalidInput);
  CHECK(error_kind([] { semigroup_bound(diag({-1}), 1.0, 1); }) == ErrorKind::InvalidInput);
}

TEST_CASE("fractional power examples") {
  CHECK(dist(fractional_power(OperatorMatrix::identity(3), 0.5), OperatorMatrix::identity(3)) < 1e-14);
  CHECK(dist(fractional_power(diag({4, 9}), 0.5), diag({2, 3})) < 1e-14);

  // Q diag(1, 16) Q^T with a rotation Q
  const double c = std::cos(0.7);
  const double s = std::sin(0.7);
  Eigen::Matrix2d q;
  q << c, -s, s, c;
  const Eigen::Matrix2d spd = q * Eigen::Vector2d(1, 16).asDiagonal() * q.transpose();
  const auto root = fractional_power(OperatorMatrix::from_real(spd), 0.25);
  const auto ev = sorted(spectrum(root).eigenvalues);
  CHECK(std::abs(ev[0] - cplx(1.0)) < 1e-12);
  CHECK(std::abs(ev[1] - cplx(2.0)) < 1e-12);
}

TEST_CASE("fractional power branch cut and alpha range") {
  CHECK(error_kind([] { fractional_power(diag({-1, 2}), 0.5); }) == ErrorKind::BranchCutViolation);
  CHECK(error_kind([] { fractional_power(diag({0, 2}), 0.5); }) == ErrorKind::BranchCutViolation);
  CHECK(error_kind([] { fractional_power(diag({1, 2}), 0.0); }) == ErrorKind::InvalidInput);
  CHECK(error_kind([] { fractional_power(diag({1, 2}), 1.5); }) == ErrorKind::InvalidInput);
}

TEST_CASE("fractional power of a defective matrix") {
  // [[4,1],[0,4]]^(1/2) = [[2, 1/4],[0, 2]]
  CHECK(dist(fractional_power(real({{4, 1}, {0, 4}}), 0.5), real({{2, 0.25}, {0, 2}})) < 1e-12);
}

TEST_CASE("property: resolvent identity") {
  SeededRng rng(101);
  for (int trial = 0; trial < 50; ++trial) {
    const auto a = random_matrix(rng, rng.integer(1, 8));
    const double na = operator_norm(a);
    const double lam = na + 1.0 + rng.uniform(0.0, 5.0);
    const double mu = na + 1.0 + rng.uniform(0.0, 5.0);
    const CMatrix rl = resolvent(a, lam).matrix();
    const CMatrix rm = resolvent(a, mu).matrix();
    const double defect = la::norm2(rl - rm - (mu - lam) * rl * rm);
    CHECK(defect <= 1e-9 / na);
  }
}

TEST_CASE("property: Neumann decay") {
  SeededRng rng(102);
  for (int trial = 0; trial < 50; ++trial) {
    const auto n = rng.integer(1, 8);
    const auto a = random_matrix(rng, n);
    const double na = operator_norm(a);
    for (double factor : {2.0, 5.0, 100.0, 1e4}) {
      const double mu = factor * na;
      const CMatrix diff = mu * resolvent(a, mu).matrix() - CMatrix::Identity(n, n);
      CHECK(la::norm2(diff) <= 2.0 * na / mu);
    }
  }
}

TEST_CASE("property: semigroup law") {
  SeededRng rng(103);
  for (int trial = 0; trial < 30; ++trial) {
    const auto a = random_matrix(rng, rng.integer(1, 8));
    for (double s : {0.1, 0.5, 1.0}) {
      for (double t : {0.1, 0.5, 1.0}) {
        const auto whole = matrix_exp(a, s + t);
        const auto split = matrix_exp(a, s) * matrix_exp(a, t);
        CHECK(dist(whole, split) <= 1e-10 * (1.0 + operator_norm(whole)));
      }
    }
  }
}

TEST_CASE("property: fractional power composition") {
  SeededRng rng(104);
  for (int trial = 0; trial < 30; ++trial) {
    const auto a = random_spd(rng, rng.integer(1, 6));
    const double alpha = rng.uniform(0.05, 0.6);
    const double beta = rng.uniform(0.05, 1.0 - alpha);
    const auto lhs = fractional_power(a, alpha) * fractional_power(a, beta);
    const auto rhs = fractional_power(a, alpha + beta);
    CHECK(dist(lhs, rhs) <= 1e-8 * operator_norm(rhs));
  }
}

TEST_CASE("property: spectrum of the exponential") {
  SeededRng rng(105);
  for (int trial = 0; trial < 30; ++trial) {
    const auto n = rng.integer(1, 8);
    const Eigen::MatrixXd g = rng.normal_matrix(n, n);
    const auto a = OperatorMatrix::from_real(0.5 * (g + g.transpose()));
    auto expected = spectrum(a).eigenvalues;
    for (auto &z : expected) z = std::exp(z);
    expected = sorted(expected);
    const auto got = sorted(spectrum(matrix_exp(a, 1.0)).eigenvalues);
    REQUIRE(got.size() == expected.size());
    for (std::size_t k = 0; k < got.size(); ++k) {
      CHECK(std::abs(got[k] - expected[k]) <= 1e-8 * std::max(1.0, std::abs(expected[k])));
    }
  }
}

TEST_CASE("operator matrices are shared safely") {
  SeededRng rng(106);
  const auto a = random_matrix(rng, 6);
  const auto copy = a;
  CHECK(&a.spectral_data() == &copy.spectral_data());
  CHECK(copy == a);
  CHECK(a.norm() == operator_norm(copy));
}

}  // TEST_SUITE
