// SPDX-License-Identifier: Apache-2.0

#include <cmath>

#include "util.hpp"
#include "yosida/models.hpp"

using namespace yosida;
using namespace testutil;

namespace {

ReactionDiffusionConfig modal(int n_modes, double a = 1.0, double b = 0.5) {
  ReactionDiffusionConfig cfg;
  cfg.a = a;
  cfg.b = b;
  cfg.n_modes = n_modes;
  return cfg;
}

ReactionDiffusionConfig fd(int m) {
  ReactionDiffusionConfig cfg;
  cfg.disc = SpatialDisc::FiniteDifference;
  cfg.m = m;
  return cfg;
}

}  // namespace

TEST_SUITE("models") {

TEST_CASE("config validation") {
  CHECK(error_kind([] { modal(1, -1.0).validate(); }) == ErrorKind::InvalidInput);
  CHECK(error_kind([] { modal(0).validate(); }) == ErrorKind::InvalidInput);
  CHECK(error_kind([] { fd(4).validate(); }) == ErrorKind::InvalidInput);
}

TEST_CASE("unperturbed modal systems") {
  const auto one = build_unperturbed(modal(1, 1.0));
  CHECK(one.A() == real({{-2}}));
  CHECK(one.B_point() == real({{-0.5}}));
  CHECK(one.kernel().empty());

  const auto three = build_unperturbed(modal(3, 0.5));
  CHECK(three.A() == diag({-1.5, -4.5, -9.5}));
  CHECK(mode_labels(modal(3)) == std::vector<int>{1, 2, 3});
}

TEST_CASE("finite-difference Laplacian approximates -n^2") {
  const auto ops = spatial_operators(fd(200));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(ops.laplacian);
  const Eigen::VectorXd ev = es.eigenvalues();
  CHECK(ev(ev.size() - 1) == doctest::Approx(-1.0).epsilon(1e-4));
  CHECK(ev(ev.size() - 2) == doctest::Approx(-4.0).epsilon(1e-4));
  CHECK(ops.grid.size() == 200);
}

TEST_CASE("zero perturbation is the identity") {
  for (const auto &cfg : {modal(4), fd(16)}) {
    for (auto kind : {ExampleKind::FirstOrderPerturbation, ExampleKind::DelayedDerivative}) {
      CHECK(build_perturbed(cfg, PerturbationConfig{}, kind) == build_unperturbed(cfg));
    }
  }
}

TEST_CASE("modal first-order perturbation scales the Laplacian") {
  PerturbationConfig p;
  p.eps1 = 0.1;
  const auto sys = build_perturbed(modal(3, 0.5), p, ExampleKind::FirstOrderPerturbation);
  for (int n = 1; n <= 3; ++n) {
    CHECK(sys.A()(n - 1, n - 1).real() == doctest::Approx(-1.1 * n * n - 0.5).epsilon(1e-14));
  }
}

TEST_CASE("constant multiplication is exact") {
  // the multiplier enters as -(a + eps3) w
  PerturbationConfig p;
  p.eps3_samples = {0.2};
  const auto sys = build_perturbed(modal(3), p, ExampleKind::FirstOrderPerturbation);
  CHECK(dist(sys.A(), build_unperturbed(modal(3)).A() - 0.2 * OperatorMatrix::identity(3)) < 1e-15);
}

TEST_CASE("kernel atom bookkeeping") {
  PerturbationConfig p;
  p.eps4_atoms = {{-0.5, 0.05}};
  CHECK(p.var_eps4() == doctest::Approx(0.05));
  const auto sys = build_perturbed(modal(2), p, ExampleKind::DelayedDerivative);
  REQUIRE(sys.kernel().size() == 1);
  CHECK(sys.kernel()[0].theta == -0.5);
  CHECK(sys.kernel()[0].weight == 0.05 * OperatorMatrix::identity(2));
}

TEST_CASE("perturbation/example mismatches") {
  PerturbationConfig p;
  p.eps2 = 0.1;
  CHECK(error_kind([&] { build_perturbed(modal(2), p, ExampleKind::DelayedDerivative); }) ==
        ErrorKind::InvalidPerturbation);
  PerturbationConfig q;
  q.eps5 = 0.1;
  CHECK(error_kind([&] { build_perturbed(modal(2), q, ExampleKind::FirstOrderPerturbation); }) ==
        ErrorKind::InvalidPerturbation);
  PerturbationConfig e;
  e.eps3_samples.clear();
  CHECK(error_kind([&] { build_perturbed(modal(2), e, ExampleKind::FirstOrderPerturbation); }) ==
        ErrorKind::InvalidPerturbation);
}

TEST_CASE("A0-boundedness with a constant multiplier is tight") {
  PerturbationConfig p;
  p.eps3_samples = {0.3};
  const auto r = a0_bound_check(fd(32), p);
  CHECK(r.holds);
  REQUIRE(r.lhs_samples.size() == static_cast<std::size_t>(kA0BoundSamples));
  for (std::size_t k = 0; k < r.lhs_samples.size(); ++k) {
    CHECK(r.lhs_samples[k] == doctest::Approx(r.rhs_samples[k]).epsilon(1e-12));
  }
  CHECK(r.seed == 62);
}

TEST_CASE("A0-boundedness with a first-order coefficient") {
  PerturbationConfig p;
  p.eps1 = 0.1;
  const auto r = a0_bound_check(fd(32), p, 7);
  CHECK(r.holds);
  CHECK(r.displayed_form_holds);
}

TEST_CASE("A0-boundedness on random mixed perturbations") {
  SeededRng rng(501);
  for (int trial = 0; trial < 10; ++trial) {
    PerturbationConfig p;
    p.eps1 = rng.uniform(0.0, 0.3);
    p.eps2 = rng.uniform(0.0, 0.3);
    p.eps3_samples.assign(9, 0.0);
    for (auto &v : p.eps3_samples) v = rng.uniform(-0.5, 0.5);
    CHECK(a0_bound_check(fd(48), p, 1000 + trial).holds);
  }
}

TEST_CASE("A0-boundedness needs the finite-difference path") {
  CHECK(error_kind([] { a0_bound_check(modal(3), PerturbationConfig{}); }) == ErrorKind::InvalidInput);
}

TEST_CASE("functional bound examples") {
  const auto none = functional_bound_check(modal(3), PerturbationConfig{});
  CHECK(none.dY_value == 0.0);
  CHECK(none.bound == 0.0);
  CHECK(none.holds);

  PerturbationConfig one;
  one.eps4_atoms = {{-0.5, 0.1}};
  const auto r1 = functional_bound_check(modal(3), one);
  CHECK(r1.holds);
  CHECK(r1.dY_value <= 0.1 * 1.05);

  PerturbationConfig mixed;
  mixed.eps5 = 0.05;
  mixed.eps4_atoms = {{-0.25, 0.01}, {-0.75, -0.01}};
  const auto r2 = functional_bound_check(modal(3), mixed);
  CHECK(r2.bound == doctest::Approx(0.07));
  CHECK(r2.holds);
  CHECK(r2.sampled_lower <= r2.dY_value * (1.0 + 1e-12));
}

TEST_CASE("functional bound is for the delayed-derivative example") {
  PerturbationConfig p;
  p.eps2 = 0.1;
  CHECK(error_kind([&] { functional_bound_check(modal(2), p); }) == ErrorKind::InvalidPerturbation);
}

TEST_CASE("sufficient stability condition on the parameter grid") {
  for (double a : {0.5, 1.0, 2.0}) {
    for (double r : {0.5, 1.0, 2.0}) {
      auto cfg = modal(10, a, 0.9 / r);
      cfg.r = r;
      const auto rep = dichotomy_of_delay_system(build_unperturbed(cfg), mode_labels(cfg), 12);
      CHECK(rep.combined.hyperbolic);
      CHECK(rep.root_verdict);
    }
  }
}

TEST_CASE("modal and finite-difference verdicts agree") {
  for (double b : {0.5, 2.5}) {
    auto m = modal(3, 1.0, b);
    auto f = fd(24);
    f.a = 1.0;
    f.b = b;
    const auto rm = dichotomy_of_delay_system(build_unperturbed(m), mode_labels(m), 10).combined;
    const auto rf = dichotomy_of_delay_system(build_unperturbed(f), std::nullopt, 10).combined;
    CHECK(rm.hyperbolic == rf.hyperbolic);
    // same number of unstable eigenvalues (the higher FD modes are all stable)
    CHECK(3 * 11 - rm.rank == 24 * 11 - rf.rank);
  }
}

}  // TEST_SUITE
