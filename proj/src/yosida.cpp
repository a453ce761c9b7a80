// SPDX-License-Identifier: Apache-2.0

#include "yosida/yosida.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace yosida {

namespace {

CMatrix yosida_raw(const OperatorMatrix &a, double mu) {
  // mu^2 R - mu I = mu (mu R - I) = mu R A
  const OperatorMatrix r = resolvent(a, cplx(mu, 0.0));
  return mu * (r.matrix() * a.matrix());
}

// Lexicographic order on entries, used to make the distance exactly symmetric.
bool entries_less(const CMatrix &a, const CMatrix &b) {
  for (Eigen::Index k = 0; k < a.size(); ++k) {
    const cplx x = a.data()[k];
    const cplx y = b.data()[k];
    if (x.real() != y.real()) return x.real() < y.real();
    if (x.imag() != y.imag()) return x.imag() < y.imag();
  }
  return false;
}

}  // namespace

OperatorMatrix yosida_approx(const OperatorMatrix &a, double mu) {
  if (!std::isfinite(mu)) throw Error(ErrorKind::InvalidInput, "yosida_approx: mu not finite");
  if (!(mu > a.spectral_abscissa())) {
    Error err(ErrorKind::SingularResolvent,
              "yosida_approx: mu must exceed the spectral abscissa");
    throw err;
  }
  return OperatorMatrix(yosida_raw(a, mu));
}

std::vector<double> default_mu_grid(const OperatorMatrix &a, const OperatorMatrix &b,
                                    const MuGridConfig &cfg) {
  if (cfg.points < 4) throw Error(ErrorKind::InvalidInput, "mu grid needs at least 4 points");
  if (!(cfg.span > 1.0)) throw Error(ErrorKind::InvalidInput, "mu grid span must exceed 1");
  const double abscissa = std::max(a.spectral_abscissa(), b.spectral_abscissa());
  const double mu0 = cfg.mu0.value_or(2.0 * (1.0 + std::max(0.0, abscissa)));
  if (!(mu0 > abscissa + 1.0)) {
    throw Error(ErrorKind::InvalidInput, "mu grid must start beyond spectral abscissa + 1");
  }
  std::vector<double> grid(static_cast<std::size_t>(cfg.points));
  const double log_span = std::log(cfg.span);
  for (int k = 0; k < cfg.points; ++k) {
    grid[static_cast<std::size_t>(k)] = mu0 * std::exp(log_span * k / (cfg.points - 1));
  }
  return grid;
}

void summarize_tail(YosidaDistanceEstimate &est, const MuGridConfig &cfg) {
  const std::size_t n = est.samples.size();
  const std::size_t tail = std::max<std::size_t>(2, n / 4);
  const std::size_t first = n - tail;
  double hi = 0.0;
  double lo = std::numeric_limits<double>::infinity();
  for (std::size_t k = first; k < n; ++k) {
    hi = std::max(hi, est.samples[k]);
    lo = std::min(lo, est.samples[k]);
  }
  est.value = hi;
  if (hi <= std::numeric_limits<double>::min()) {
    est.tail_slope = 0.0;
    est.tail_spread = 0.0;
    est.converged = true;
    return;
  }
  est.tail_spread = (hi - lo) / hi;

  // Least-squares slope of log(sample) against log(mu).
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const double floor = hi * 1e-300;
  for (std::size_t k = first; k < n; ++k) {
    const double x = std::log(est.mu_grid[k]);
    const double y = std::log(std::max(est.samples[k], floor));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double m = static_cast<double>(tail);
  const double denom = m * sxx - sx * sx;
  est.tail_slope = denom != 0.0 ? (m * sxy - sx * sy) / denom : 0.0;
  est.converged =
      std::abs(est.tail_slope) <= cfg.slope_tol && est.tail_spread <= cfg.spread_tol;
}

YosidaDistanceEstimate yosida_distance(const OperatorMatrix &a, const OperatorMatrix &b,
                                       const MuGridConfig &cfg) {
  if (a.dim() != b.dim()) throw Error(ErrorKind::InvalidInput, "yosida_distance: dim mismatch");
  YosidaDistanceEstimate est;
  est.mu_grid = default_mu_grid(a, b, cfg);
  const bool swap = entries_less(b.matrix(), a.matrix());
  const OperatorMatrix &first = swap ? b : a;
  const OperatorMatrix &second = swap ? a : b;
  est.samples.reserve(est.mu_grid.size());
  const bool same = a.matrix() == b.matrix();
  for (double mu : est.mu_grid) {
    if (same) {
      est.samples.push_back(0.0);
      continue;
    }
    est.samples.push_back(la::norm2(yosida_raw(first, mu) - yosida_raw(second, mu)));
  }
  summarize_tail(est, cfg);
  return est;
}

BoundedPerturbationReport verify_bounded_perturbation_bound(const OperatorMatrix &a,
                                                            const OperatorMatrix &c,
                                                            const SemigroupBound &bound,
                                                            const MuGridConfig &cfg) {
  BoundedPerturbationReport report;
  report.estimate = yosida_distance(a, a + c, cfg);
  if (!report.estimate.converged) {
    throw Error(ErrorKind::InconclusiveVerification,
                "d_Y(A, A+C) estimate did not converge on the mu grid");
  }
  report.lhs = report.estimate.value;
  report.rhs = bound.M * bound.M * operator_norm(c);
  report.holds = report.lhs <= report.rhs + 1e-6;
  return report;
}

ClassPReport class_P_constant(const OperatorMatrix &a, const OperatorMatrix &c,
                              const QuadratureConfig &quad, const MuGridConfig &cfg) {
  if (a.dim() != c.dim()) throw Error(ErrorKind::InvalidInput, "class_P_constant: dim mismatch");
  if (!(quad.delta > 0.0 && quad.delta < 1.0)) {
    throw Error(ErrorKind::InvalidInput, "class_P_constant: delta must lie in (0, 1)");
  }
  ClassPReport report;
  const CMatrix &am = a.matrix();
  const CMatrix &cm = c.matrix();
  const bool zero_c = cm.isZero(0.0);
  auto k_t = [&](double t) {
    if (zero_c) return 0.0;
    return la::norm2(cm * la::expm(t * am));
  };

  double error = 0.0;
  double l1 = 0.0;
  const double integral = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
      k_t, quad.delta, 1.0, quad.max_depth, 1e-12, &error, &l1);
  if (!std::isfinite(integral) || error > quad.abs_tol) {
    throw Error(ErrorKind::DivergentClassP,
                "class_P_constant: quadrature of ||C exp(tA)|| did not converge");
  }
  // For t < delta the integrand is taken to be bounded by K_delta.
  const double k_delta = k_t(quad.delta);
  report.truncation_error = quad.delta * k_delta;
  report.K = integral + report.truncation_error;
  report.quadrature_error = error;

  const YosidaDistanceEstimate est = yosida_distance(a, a + c, cfg);
  report.dY = est.value;
  report.dY_converged = est.converged;
  report.holds = report.dY <= report.K + 1e-4;
  return report;
}

SemigroupDifferenceReport semigroup_difference_bound(const OperatorMatrix &a,
                                                     const OperatorMatrix &b,
                                                     const std::vector<double> &t_grid, double M,
                                                     double omega,
                                                     const MuGridConfig &cfg) {
  if (a.dim() != b.dim()) {
    throw Error(ErrorKind::InvalidInput, "semigroup_difference_bound: dim mismatch");
  }
  if (!(M >= 1.0) || !std::isfinite(omega)) {
    throw Error(ErrorKind::InvalidInput, "semigroup_difference_bound: need M >= 1, finite omega");
  }
  SemigroupDifferenceReport report;
  report.M = M;
  report.omega = std::max(0.0, omega);
  report.dY = yosida_distance(a, b, cfg).value;
  for (double t : t_grid) {
    if (!(t >= 0.0)) throw Error(ErrorKind::InvalidInput, "t grid must be non-negative");
    SemigroupDifferenceRow row;
    row.t = t;
    row.lhs = la::norm2(la::expm(t * a.matrix()) - la::expm(t * b.matrix()));
    row.rhs = t * M * M * std::exp(4.0 * report.omega * t) * report.dY;
    row.holds = row.lhs <= row.rhs * (1.0 + 1e-6) + 1e-9;
    report.all_hold = report.all_hold && row.holds;
    report.rows.push_back(row);
  }
  return report;
}

}  // namespace yosida
