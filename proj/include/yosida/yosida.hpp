// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <vector>

#include "yosida/linops.hpp"

namespace yosida {

/// A_mu = mu^2 R(mu, A) - mu I, evaluated as mu R(mu, A) A to avoid cancellation.
OperatorMatrix yosida_approx(const OperatorMatrix &a, double mu);

struct MuGridConfig {
  int points = 64;
  double span = 1e8;            // grid covers [mu0, span * mu0]
  std::optional<double> mu0;    // default: 2 (1 + max(0, spectral abscissa))
  double slope_tol = 1e-2;
  double spread_tol = 1e-3;
};

/// Finite surrogate for limsup_{mu -> inf} ||A_mu - B_mu||.
struct YosidaDistanceEstimate {
  double value = 0.0;
  std::vector<double> mu_grid;
  std::vector<double> samples;
  double tail_slope = 0.0;
  double tail_spread = 0.0;
  bool converged = false;
};

std::vector<double> default_mu_grid(const OperatorMatrix &a, const OperatorMatrix &b,
                                    const MuGridConfig &cfg = {});

YosidaDistanceEstimate yosida_distance(const OperatorMatrix &a, const OperatorMatrix &b,
                                       const MuGridConfig &cfg = {});

/// Fills value/slope/spread/converged from mu_grid and samples.
void summarize_tail(YosidaDistanceEstimate &est, const MuGridConfig &cfg);

struct BoundedPerturbationReport {
  double lhs = 0.0;  // d_Y(A, A + C)
  double rhs = 0.0;  // M^2 ||C||
  bool holds = false;
  YosidaDistanceEstimate estimate;
};

BoundedPerturbationReport verify_bounded_perturbation_bound(const OperatorMatrix &a,
                                                            const OperatorMatrix &c,
                                                            const SemigroupBound &bound,
                                                            const MuGridConfig &cfg = {});

struct QuadratureConfig {
  double delta = 1e-8;      // integrate K_t over (delta, 1]
  double abs_tol = 1e-6;
  unsigned max_depth = 15;
};

struct ClassPReport {
  double K = 0.0;
  double quadrature_error = 0.0;
  double truncation_error = 0.0;  // delta * K_delta
  double dY = 0.0;                // d_Y(A, A + C)
  bool dY_converged = false;
  bool holds = false;             // dY <= K + 1e-4
};

ClassPReport class_P_constant(const OperatorMatrix &a, const OperatorMatrix &c,
                              const QuadratureConfig &quad = {}, const MuGridConfig &cfg = {});

struct SemigroupDifferenceRow {
  double t = 0.0;
  double lhs = 0.0;  // ||exp(tA) - exp(tB)||
  double rhs = 0.0;  // t M^2 e^{4 omega t} d_Y(A, B)
  bool holds = false;
};

struct SemigroupDifferenceReport {
  double M = 1.0;
  double omega = 0.0;  // after clamping to >= 0
  double dY = 0.0;
  std::vector<SemigroupDifferenceRow> rows;
  bool all_hold = true;
};

SemigroupDifferenceReport semigroup_difference_bound(const OperatorMatrix &a,
                                                     const OperatorMatrix &b,
                                                     const std::vector<double> &t_grid, double M,
                                                     double omega,
                                                     const MuGridConfig &cfg = {});

}  // namespace yosida
