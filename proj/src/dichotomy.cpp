// SPDX-License-Identifier: Apache-2.0

#include "yosida/dichotomy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

namespace yosida {

namespace {

// Swap the adjacent diagonal entries k, k+1 of the upper-triangular t, updating
// the unitary factor u so that u t u^H is unchanged.
void swap_adjacent(CMatrix &t, CMatrix &u, Eigen::Index k) {
  const cplx t11 = t(k, k);
  const cplx t22 = t(k + 1, k + 1);
  const cplx x0 = t(k, k + 1);
  const cplx x1 = t22 - t11;
  const double len = std::hypot(std::abs(x0), std::abs(x1));
  if (len == 0.0) return;
  const cplx c = x0 / len;
  const cplx s = x1 / len;
  Eigen::Matrix2cd q;
  q << c, -std::conj(s), s, std::conj(c);
  const Eigen::Index n = t.rows();
  t.block(k, k, 2, n - k) = q.adjoint() * t.block(k, k, 2, n - k);
  t.block(0, k, k + 2, 2) = t.block(0, k, k + 2, 2) * q;
  u.middleCols(k, 2) = u.middleCols(k, 2) * q;
  t(k + 1, k) = 0.0;
}

// Solves t11 y - y t22 = rhs for upper-triangular t11, t22 with disjoint spectra.
CMatrix solve_triangular_sylvester(const CMatrix &t11, const CMatrix &t22, const CMatrix &rhs) {
  const Eigen::Index k = t11.rows();
  const Eigen::Index m = t22.rows();
  CMatrix y = CMatrix::Zero(k, m);
  for (Eigen::Index j = 0; j < m; ++j) {
    CVector col = rhs.col(j);
    for (Eigen::Index i = 0; i < j; ++i) col += y.col(i) * t22(i, j);
    CMatrix shifted = t11;
    shifted.diagonal().array() -= t22(j, j);
    y.col(j) = shifted.triangularView<Eigen::Upper>().solve(col);
  }
  return y;
}

struct OrderedSchur {
  CMatrix t;
  CMatrix u;
  Eigen::Index selected = 0;
};

OrderedSchur ordered_schur(const CMatrix &m, const std::function<bool(cplx)> &inside) {
  Eigen::ComplexSchur<CMatrix> schur(m);
  if (schur.info() != Eigen::Success) {
    throw Error(ErrorKind::SpectrumFailure, "complex Schur decomposition did not converge");
  }
  OrderedSchur out{schur.matrixT(), schur.matrixU(), 0};
  out.t.triangularView<Eigen::StrictlyLower>().setZero();
  const Eigen::Index n = m.rows();
  // Selection is decided once on the original diagonal so that rounding in the
  // swaps cannot flip a verdict.
  std::vector<bool> flags(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) flags[static_cast<std::size_t>(i)] = inside(out.t(i, i));
  for (Eigen::Index j = 0; j < n; ++j) {
    if (!flags[static_cast<std::size_t>(j)]) continue;
    for (Eigen::Index i = j; i > out.selected; --i) {
      swap_adjacent(out.t, out.u, i - 1);
      std::swap(flags[static_cast<std::size_t>(i)], flags[static_cast<std::size_t>(i - 1)]);
    }
    ++out.selected;
  }
  return out;
}

// P = U [[I, -Y], [0, 0]] U^H.
CMatrix projection_from_schur(const OrderedSchur &s, CMatrix *y_out = nullptr) {
  const Eigen::Index n = s.t.rows();
  const Eigen::Index k = s.selected;
  CMatrix block = CMatrix::Zero(n, n);
  if (k == 0) return block;
  if (k == n) return CMatrix::Identity(n, n);
  const CMatrix y = solve_triangular_sylvester(s.t.topLeftCorner(k, k),
                                               s.t.bottomRightCorner(n - k, n - k),
                                               -s.t.topRightCorner(k, n - k));
  block.topLeftCorner(k, k).setIdentity();
  block.topRightCorner(k, n - k) = -y;
  if (y_out != nullptr) *y_out = y;
  return s.u * block * s.u.adjoint();
}

std::vector<cplx> t1_eigenvalues(const CMatrix &t1) {
  return spectrum(OperatorMatrix(t1)).eigenvalues;
}

double circle_gap(const std::vector<cplx> &eig) {
  double gap = std::numeric_limits<double>::infinity();
  for (const cplx &z : eig) gap = std::min(gap, std::abs(std::abs(z) - 1.0));
  return gap;
}

bool in_open_disc(cplx z) { return std::abs(z) < 1.0; }

}  // namespace

CMatrix schur_spectral_projection(const CMatrix &m, const std::function<bool(cplx)> &inside,
                                  int *rank) {
  const OrderedSchur s = ordered_schur(m, inside);
  if (rank != nullptr) *rank = static_cast<int>(s.selected);
  return projection_from_schur(s);
}

CMatrix schur_projection_inside_disc(const CMatrix &t1, int *rank) {
  return schur_spectral_projection(t1, in_open_disc, rank);
}

CMatrix riesz_projection_unit_circle(const CMatrix &t1, int points) {
  if (points < 4) throw Error(ErrorKind::InvalidInput, "contour needs at least 4 points");
  const Eigen::Index n = t1.rows();
  CMatrix sum = CMatrix::Zero(n, n);
  const CMatrix ident = CMatrix::Identity(n, n);
  // dz = i z dtheta, so (2 pi i)^{-1} dz -> z / points per node.
  for (int k = 0; k < points; ++k) {
    const double theta = 2.0 * std::numbers::pi * k / points;
    const cplx z = std::polar(1.0, theta);
    sum += z * (z * ident - t1).partialPivLu().inverse();
  }
  return sum / static_cast<double>(points);
}

DichotomyReport check_hyperbolic(const OperatorMatrix &g, const DichotomyConfig &cfg) {
  DichotomyReport report;
  const CMatrix t1 = la::expm(g.matrix());
  report.t1_spectrum = t1_eigenvalues(t1);
  report.gap = circle_gap(report.t1_spectrum);
  report.hyperbolic = report.gap > cfg.gap_tol;
  for (const cplx &z : report.t1_spectrum) report.rank += in_open_disc(z) ? 1 : 0;
  if (!report.hyperbolic) {
    report.N = 1.0;
    report.alpha = 0.0;
    return report;
  }

  const Eigen::Index n = g.dim();
  const OrderedSchur schur = ordered_schur(t1, in_open_disc);
  CMatrix y;
  const CMatrix p_schur = projection_from_schur(schur, &y);
  const double p_norm = la::norm2(p_schur);

  for (int points = cfg.contour_points; points <= cfg.max_contour_points; points *= 2) {
    const CMatrix p_contour = riesz_projection_unit_circle(t1, points);
    report.contour_points_used = points;
    report.contour_deviation = la::norm2(p_contour - p_schur);
    if (report.contour_deviation <= cfg.projection_tol * (1.0 + p_norm)) {
      report.contour_verified = true;
      report.projection = OperatorMatrix(p_contour, "P");
      break;
    }
  }
  if (!report.contour_verified) report.projection = OperatorMatrix(p_schur, "P");
  const CMatrix &p = report.projection->matrix();

  double rate = std::numeric_limits<double>::infinity();
  for (const cplx &z : report.t1_spectrum) {
    const double mag = std::max(std::abs(z), std::numeric_limits<double>::denorm_min());
    rate = std::min(rate, std::abs(std::log(mag)));
  }
  report.alpha = rate - 1e-9;

  // Restrictions of T(t_step) to the two invariant subspaces. The leading Schur
  // vectors span range(P); range(I - P) is spanned by U1 Y + U2.
  const Eigen::Index k = schur.selected;
  const CMatrix step = la::expm(cfg.t_step * g.matrix());
  const CMatrix ident = CMatrix::Identity(n, n);
  CMatrix stable_basis = schur.u.leftCols(k);
  CMatrix unstable_basis;
  if (k < n) {
    CMatrix w = schur.u.rightCols(n - k);
    if (k > 0) w += schur.u.leftCols(k) * y;
    Eigen::HouseholderQR<CMatrix> qr(w);
    unstable_basis = qr.householderQ() * CMatrix::Identity(n, n - k);
  }
  const CMatrix stable_step = stable_basis.adjoint() * step * stable_basis;
  const CMatrix unstable_step = unstable_basis.adjoint() * step * unstable_basis;
  const CMatrix unstable_step_inv =
      k < n ? CMatrix(unstable_step.partialPivLu().inverse()) : CMatrix();
  const CMatrix stable_coords = stable_basis.adjoint() * p;                 // S^H P
  const CMatrix unstable_coords = unstable_basis.adjoint() * (ident - p);   // W^H (I - P)

  CMatrix fwd = CMatrix::Identity(k, k);
  CMatrix bwd = CMatrix::Identity(n - k, n - k);
  double big_n = 1.0;
  const int steps = static_cast<int>(std::lround(cfg.t_max / cfg.t_step));
  for (int s = 0; s <= steps; ++s) {
    const double t = s * cfg.t_step;
    report.t_grid_checked.push_back(t);
    const double weight = std::exp(report.alpha * t);
    if (k > 0) big_n = std::max(big_n, la::norm2(fwd * stable_coords) * weight);
    if (k < n) big_n = std::max(big_n, la::norm2(bwd * unstable_coords) * weight);
    if (k > 0) fwd = stable_step * fwd;
    if (k < n) bwd = unstable_step_inv * bwd;
  }
  report.N = big_n;
  return report;
}

double persistence_margin(const OperatorMatrix &g0, int samples) {
  const CMatrix t1 = la::expm(g0.matrix());
  if (!(circle_gap(t1_eigenvalues(t1)) > DichotomyConfig{}.gap_tol)) {
    throw Error(ErrorKind::NotHyperbolic, "persistence_margin: generator is not hyperbolic");
  }
  const Eigen::Index n = t1.rows();
  const CMatrix ident = CMatrix::Identity(n, n);
  auto f = [&](double theta) {
    return la::min_singular_value(std::polar(1.0, theta) * ident - t1);
  };
  const double h = 2.0 * std::numbers::pi / samples;
  std::vector<double> values(static_cast<std::size_t>(samples));
  for (int k = 0; k < samples; ++k) values[static_cast<std::size_t>(k)] = f(h * k);
  double best = *std::min_element(values.begin(), values.end());

  // Golden-section refinement around the smallest few local minima.
  std::vector<int> minima;
  for (int k = 0; k < samples; ++k) {
    const double prev = values[static_cast<std::size_t>((k + samples - 1) % samples)];
    const double next = values[static_cast<std::size_t>((k + 1) % samples)];
    const double cur = values[static_cast<std::size_t>(k)];
    if (cur <= prev && cur <= next) minima.push_back(k);
  }
  std::sort(minima.begin(), minima.end(), [&](int a, int b) {
    return values[static_cast<std::size_t>(a)] < values[static_cast<std::size_t>(b)];
  });
  if (minima.size() > 4) minima.resize(4);
  const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int k : minima) {
    double lo = h * (k - 1);
    double hi = h * (k + 1);
    double x1 = hi - ratio * (hi - lo);
    double x2 = lo + ratio * (hi - lo);
    double f1 = f(x1);
    double f2 = f(x2);
    for (int it = 0; it < 60 && hi - lo > 1e-13; ++it) {
      if (f1 < f2) {
        hi = x2;
        x2 = x1;
        f2 = f1;
        x1 = hi - ratio * (hi - lo);
        f1 = f(x1);
      } else {
        lo = x1;
        x1 = x2;
        f1 = f2;
        x2 = lo + ratio * (hi - lo);
        f2 = f(x2);
      }
    }
    best = std::min({best, f1, f2});
  }
  return best;
}

PersistenceReport verify_persistence(const OperatorMatrix &g0, const OperatorMatrix &g1,
                                     const DichotomyConfig &cfg) {
  if (g0.dim() != g1.dim()) throw Error(ErrorKind::InvalidInput, "verify_persistence: dim mismatch");
  PersistenceReport report;
  const CMatrix t0 = la::expm(g0.matrix());
  const CMatrix t1 = la::expm(g1.matrix());
  report.d_T1 = la::norm2(t0 - t1);
  report.margin = persistence_margin(g0);
  report.predicted_persist = report.d_T1 < report.margin;
  report.actual_hyperbolic = circle_gap(t1_eigenvalues(t1)) > cfg.gap_tol;
  report.sound = !report.predicted_persist || report.actual_hyperbolic;
  return report;
}

}  // namespace yosida
