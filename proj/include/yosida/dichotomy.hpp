// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "yosida/linops.hpp"

namespace yosida {

struct DichotomyConfig {
  double gap_tol = 1e-8;
  int contour_points = 256;       // initial trapezoid resolution on |z| = 1
  int max_contour_points = 8192;  // doubled until agreement with the Schur projection
  double projection_tol = 1e-8;
  double t_step = 0.25;
  double t_max = 8.0;
};

struct DichotomyReport {
  bool hyperbolic = false;
  double gap = 0.0;                       // min | |lambda| - 1 | over sigma(T(1))
  std::optional<OperatorMatrix> projection;
  int rank = 0;                           // dim range(P)
  double N = 1.0;
  double alpha = 0.0;
  std::vector<double> t_grid_checked;
  std::vector<cplx> t1_spectrum;
  int contour_points_used = 0;
  double contour_deviation = 0.0;         // ||P_contour - P_schur||
  bool contour_verified = false;
};

/// Projection onto the invariant subspace of the eigenvalues selected by `inside`,
/// along the complementary invariant subspace, from a reordered complex Schur form.
CMatrix schur_spectral_projection(const CMatrix &m, const std::function<bool(cplx)> &inside,
                                  int *rank = nullptr);

CMatrix schur_projection_inside_disc(const CMatrix &t1, int *rank = nullptr);

/// (2 pi i)^{-1} \oint_{|z|=1} R(z, T) dz by the trapezoid rule on `points` nodes.
CMatrix riesz_projection_unit_circle(const CMatrix &t1, int points);

DichotomyReport check_hyperbolic(const OperatorMatrix &g, const DichotomyConfig &cfg = {});

constexpr int kMarginSamples = 512;

/// min over |z| = 1 of sigma_min(zI - T(1)), sampled on 512 points and refined
/// locally around the smallest samples.
double persistence_margin(const OperatorMatrix &g0, int samples = kMarginSamples);

struct PersistenceReport {
  double d_T1 = 0.0;
  double margin = 0.0;
  bool predicted_persist = false;
  bool actual_hyperbolic = false;
  bool sound = true;  // predicted_persist implies actual_hyperbolic
};

PersistenceReport verify_persistence(const OperatorMatrix &g0, const OperatorMatrix &g1,
                                     const DichotomyConfig &cfg = {});

}  // namespace yosida
