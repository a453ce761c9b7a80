// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "yosida/delay.hpp"

namespace yosida {

enum class SpatialDisc { Modal, FiniteDifference };

/// w_t = w_xx - a w - b w(t - r) on (0, pi) with Dirichlet conditions.
struct ReactionDiffusionConfig {
  double a = 1.0;
  double b = 0.5;
  double r = 1.0;
  int n_modes = 1;              // modal path: eigenvalues -1, -4, ..., -n_modes^2
  SpatialDisc disc = SpatialDisc::Modal;
  int m = 64;                   // finite-difference interior points

  void validate() const;
  int dim() const { return disc == SpatialDisc::Modal ? n_modes : m; }
};

struct Eps4Atom {
  double theta = 0.0;
  double weight = 0.0;
};

enum class ExampleKind { FirstOrderPerturbation, DelayedDerivative };

struct PerturbationConfig {
  double eps1 = 0.0;
  double eps2 = 0.0;
  // eps3 on a uniform grid over [0, pi] (endpoints included); a single sample
  // means a constant function.
  std::vector<double> eps3_samples{0.0};
  std::vector<Eps4Atom> eps4_atoms;
  double eps5 = 0.0;

  double eps3_sup() const;
  double var_eps4() const;
  bool is_zero() const;
};

/// Spatial operators of the chosen discretization.
struct SpatialOperators {
  Eigen::MatrixXd laplacian;    // A_T
  Eigen::MatrixXd derivative;   // d/dx
  Eigen::VectorXd grid;         // interior points (FD) or empty (modal)
};

SpatialOperators spatial_operators(const ReactionDiffusionConfig &cfg);

/// Realization of multiplication by eps3 (diagonal for FD, Galerkin matrix for modal).
Eigen::MatrixXd multiplication_operator(const ReactionDiffusionConfig &cfg,
                                        const std::vector<double> &samples);

/// A0 = A_T - a I and B_point = -b I, so that modal roots satisfy
/// lambda + a + b exp(-lambda r) = -n^2.
DelaySystem build_unperturbed(const ReactionDiffusionConfig &cfg);

DelaySystem build_perturbed(const ReactionDiffusionConfig &cfg, const PerturbationConfig &pert,
                            ExampleKind example);

/// Mode labels 1..n_modes for modal systems.
std::vector<int> mode_labels(const ReactionDiffusionConfig &cfg);

struct A0BoundReport {
  std::vector<double> lhs_samples;            // ||A1 y||
  std::vector<double> rhs_samples;            // (eps1 + eps2/2)||A0 y|| + (18 eps2 + sup|eps3|)||y||
  std::vector<double> displayed_rhs_samples;  // same without the 18 eps2 term
  bool holds = false;
  bool displayed_form_holds = false;
  std::uint64_t seed = 0;
};

constexpr int kA0BoundSamples = 200;

A0BoundReport a0_bound_check(const ReactionDiffusionConfig &cfg, const PerturbationConfig &pert,
                              std::uint64_t seed = 62, int samples = kA0BoundSamples);

struct FunctionalBoundReport {
  double dY_value = 0.0;  // norm of B2 from C([-r,0], X_{1/2}) to X
  double bound = 0.0;     // eps5 + Var(eps4)
  bool holds = false;
  double sampled_lower = 0.0;  // best ||B2 phi|| over sampled unit phi
};

FunctionalBoundReport functional_bound_check(const ReactionDiffusionConfig &cfg, const PerturbationConfig &pert,
                              std::uint64_t seed = 64, int samples = 64);

}  // namespace yosida
